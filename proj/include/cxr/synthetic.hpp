#pragma once

#include <cstdint>
#include <filesystem>

#include "cxr/trainer.hpp"

namespace cxr::synthetic {

/// Class 1 has a bright left half, class 0 a bright right half, both under
/// additive noise. Labels alternate so the set is balanced.
TrainData separable_halves(int count, int side, std::uint64_t seed);

/// Class 1 carries a faint Gaussian blob at a random position, class 0 is
/// pure structured noise. Labels are invariant under every D4 symmetry.
TrainData faint_blobs(int count, int side, std::uint64_t seed, double blob_amplitude = 0.25,
                      double noise = 0.2);

/// Writes a chest-radiograph-shaped toy dataset (images, lung masks and a
/// manifest.csv) with `count` records alternating labels 0/1.
void write_mini_dataset(const std::filesystem::path& dir, int count, int width, int height,
                        std::uint64_t seed);

}  // namespace cxr::synthetic
