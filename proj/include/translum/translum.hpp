#pragma once

// Umbrella header for the translum optical-telemetry and ultrasound
// power-transfer simulator.

#include "translum/bitstream.hpp"
#include "translum/channel.hpp"
#include "translum/config.hpp"
#include "translum/errors.hpp"
#include "translum/framing.hpp"
#include "translum/fus.hpp"
#include "translum/harness.hpp"
#include "translum/io.hpp"
#include "translum/link_config.hpp"
#include "translum/modem.hpp"
#include "translum/powerbudget.hpp"
#include "translum/rng.hpp"
#include "translum/stats.hpp"
#include "translum/version.hpp"
