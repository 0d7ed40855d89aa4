// Writes the bundled generator-matrix files for every built-in code.

#include <filesystem>
#include <iostream>

#include "osd/codes.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "codes";
    std::filesystem::create_directories(dir);
    try {
        for (const auto& name : osd::builtin_code_names()) {
            const osd::CodeSpec spec = osd::builtin_code(name);
            const auto path = dir / (name + ".txt");
            osd::save_generator(spec, path.string());
            std::cout << path.string() << "  (" << spec.n << "," << spec.k << ") d_H=" << spec.d_h
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
