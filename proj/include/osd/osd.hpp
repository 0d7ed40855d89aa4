#pragma once

#include "osd/gf2.hpp"
#include "osd/codes.hpp"
#include "osd/channel.hpp"
#include "osd/reliability.hpp"
#include "osd/decoder.hpp"
#include "osd/simbench.hpp"
