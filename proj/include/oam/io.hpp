// SPDX-License-Identifier: Apache-2.0
//
// Image, field and result files.
//
// PGM images are 16-bit P5 with a "# oam-grid {...}" comment holding the grid
// and the intensity that maps to full scale, so a written image reads back
// with its physical units. PNG images carry the same JSON in an "oam-grid"
// text chunk. Images from other sources are accepted without it; the caller
// then supplies the grid.

#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "oam/analysis.hpp"
#include "oam/field.hpp"

namespace oam {

class IoError : public Error {
public:
    using Error::Error;
};

nlohmann::json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

void write_pgm(const std::filesystem::path& path, const IntensityImage& img);
void write_png(const std::filesystem::path& path, const IntensityImage& img);

/// Reads PGM (P2/P5, 8 or 16 bit) or PNG (grayscale or RGB, averaged) by
/// extension. Non-square images are rejected. Without an embedded grid,
/// `fallback` is used with its n replaced by the image size; without either,
/// a unit-pitch grid is assumed.
IntensityImage read_image(const std::filesystem::path& path, const std::optional<GridSpec>& fallback = std::nullopt);

/// Writes by extension (.pgm or .png).
void write_image(const std::filesystem::path& path, const IntensityImage& img);

/// Raw little-endian float64 (re, im) pairs, row-major, plus `<path>.json` with the grid.
void write_field(const std::filesystem::path& path, const ComplexField& field);
ComplexField read_field(const std::filesystem::path& path);

nlohmann::json state_to_json(const PoincareState& s);
PoincareState state_from_json(const nlohmann::json& j);
nlohmann::json reading_to_json(const ImageReading& r);

}  // namespace oam
