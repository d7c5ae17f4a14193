#pragma once

// Umbrella header: the whole library in one include.  telemetry.hpp is kept
// out because it pulls in the HTTP stack (and with it pthread); include it
// explicitly where the upload leg is wanted.

#include "chirplink/errors.hpp"
#include "chirplink/rng.hpp"
#include "chirplink/radio_config.hpp"
#include "chirplink/airtime.hpp"
#include "chirplink/gray.hpp"
#include "chirplink/iq.hpp"
#include "chirplink/fft.hpp"
#include "chirplink/modem.hpp"
#include "chirplink/crc16.hpp"
#include "chirplink/fec.hpp"
#include "chirplink/text.hpp"
#include "chirplink/frame.hpp"
#include "chirplink/channel.hpp"
#include "chirplink/ser_model.hpp"
#include "chirplink/node.hpp"
#include "chirplink/scenario.hpp"
#include "chirplink/stats.hpp"
#include "chirplink/sim.hpp"
