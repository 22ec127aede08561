#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Neutral-atom preparation: synthetic fluorescence imaging, per-cell
// threshold detection, rearrangement planning and AWG move emission.

namespace uqp::atoms {

struct Site {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    friend auto operator<=>(const Site&, const Site&) = default;
};

std::uint32_t manhattan(Site a, Site b);

class AtomGrid {
  public:
    AtomGrid() = default;
    AtomGrid(std::uint32_t rows, std::uint32_t cols);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    bool occupied(Site s) const { return occupancy_.at(index(s)) != 0; }
    void set(Site s, bool value) { occupancy_.at(index(s)) = value ? 1 : 0; }
    bool contains(Site s) const { return s.row < rows_ && s.col < cols_; }
    std::size_t count() const;
    std::vector<Site> occupied_sites() const;  // row-major

    friend bool operator==(const AtomGrid&, const AtomGrid&) = default;

  private:
    std::size_t index(Site s) const { return std::size_t{s.row} * cols_ + s.col; }

    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::uint8_t> occupancy_;
};

/// 16-bit row-major fluorescence image.
struct AtomImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint16_t> pixels;

    std::uint16_t at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }
    friend bool operator==(const AtomImage&, const AtomImage&) = default;
};

inline constexpr std::uint32_t kPixelsPerCell = 5;

/// Renders each occupied site as a Gaussian spot confined to its cell, plus
/// clamped Gaussian pixel noise. Requires brightness > 3 * noise_sd.
AtomImage synth_image(const AtomGrid& grid, double brightness, double noise_sd, std::uint64_t seed,
                      std::uint32_t pixels_per_cell = kPixelsPerCell);

/// Noise-free integrated brightness of one occupied cell.
double cell_signal(double brightness, std::uint32_t pixels_per_cell = kPixelsPerCell);

/// A site is occupied iff its integrated cell brightness exceeds `threshold`.
/// Throws Error{GeometryMismatch} if the grid does not tile the image.
AtomGrid detect(const AtomImage& image, std::uint32_t rows, std::uint32_t cols, double threshold);

struct TargetPattern {
    std::vector<Site> sites;  // sorted, unique

    /// `count` sites filling a top-left rectangle row by row, as close to
    /// square as the grid width allows.
    static TargetPattern dense_rectangle(std::uint32_t rows, std::uint32_t cols, std::size_t count);
    /// Text grid: '#' required, '.' free, one row per line.
    static TargetPattern parse(std::string_view text, std::uint32_t& rows, std::uint32_t& cols);
};

struct MoveCommand {
    Site from;
    Site to;
    friend bool operator==(const MoveCommand&, const MoveCommand&) = default;
};

struct SortPlan {
    std::vector<MoveCommand> moves;
    std::uint64_t cost() const;  // total Manhattan distance
};

/// Minimum-cost assignment of surplus atoms to empty target sites. Atoms
/// already on target sites stay put. Throws Error{InsufficientAtoms}.
SortPlan plan_sort(const AtomGrid& grid, const TargetPattern& target);

/// Executes a plan move by move; throws Error{InvalidProgram} on a move from
/// an empty site or into an occupied one.
void apply_plan(AtomGrid& grid, const SortPlan& plan);

bool satisfies(const AtomGrid& grid, const TargetPattern& target);

struct FrequencyRamp {
    double start_mhz = 0.0;
    double stop_mhz = 0.0;
};

struct AwgRecord {
    Site pickup;
    Site drop;
    FrequencyRamp x;
    FrequencyRamp y;
    double duration_us = 0.0;
};

std::vector<AwgRecord> emit_moves(const SortPlan& plan);

/// Minimum-cost assignment (Hungarian method) for an n x m matrix, n <= m.
/// Returns the column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost);

std::string to_pgm(const AtomImage& image);
std::string to_json_lines(const std::vector<AwgRecord>& records);

}  // namespace uqp::atoms
