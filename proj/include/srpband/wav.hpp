#pragma once

#include <string>

#include "srpband/signal.hpp"

namespace srpband {

// Reads a RIFF/WAVE file: 16-bit PCM or 32-bit IEEE float, any channel count
// (only the first channel is kept). PCM samples are scaled to [-1, 1).
Signal read_wav(const std::string& path);

// Writes a mono 32-bit IEEE float WAV.
void write_wav_float32(const std::string& path, const Signal& signal);

} // namespace srpband
