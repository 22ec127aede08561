#include "uqp/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "uqp/error.hpp"

namespace uqp::atoms {

namespace {

// Spot width relative to the cell pitch.
constexpr double kSigmaPerCell = 0.25;

// AOD tone placeholders: centre frequency and per-site spacing.
constexpr double kBaseMhz = 75.0;
constexpr double kSpacingMhz = 1.0;
constexpr double kMicrosPerSite = 50.0;

double spot(double brightness, std::uint32_t ppc, std::uint32_t px, std::uint32_t py) {
    const double centre = ppc / 2.0;
    const double sigma = ppc * kSigmaPerCell;
    const double dx = px + 0.5 - centre;
    const double dy = py + 0.5 - centre;
    return brightness * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
}

}  // namespace

std::uint32_t manhattan(Site a, Site b) {
    auto d = [](std::uint32_t x, std::uint32_t y) { return x > y ? x - y : y - x; };
    return d(a.row, b.row) + d(a.col, b.col);
}

AtomGrid::AtomGrid(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), occupancy_(std::size_t{rows} * cols, 0) {}

std::size_t AtomGrid::count() const { return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), 1)); }

std::vector<Site> AtomGrid::occupied_sites() const {
    std::vector<Site> out;
    for (std::uint32_t r = 0; r < rows_; ++r) {
        for (std::uint32_t c = 0; c < cols_; ++c) {
            if (occupied({r, c})) out.push_back({r, c});
        }
    }
    return out;
}

double cell_signal(double brightness, std::uint32_t ppc) {
    double total = 0.0;
    for (std::uint32_t y = 0; y < ppc; ++y) {
        for (std::uint32_t x = 0; x < ppc; ++x) total += spot(brightness, ppc, x, y);
    }
    return total;
}

AtomImage synth_image(const AtomGrid& grid, double brightness, double noise_sd, std::uint64_t seed,
                      std::uint32_t ppc) {
    if (ppc == 0) throw Error(ErrorCode::GeometryMismatch, "pixels per cell must be positive");
    if (!(brightness > 3 * noise_sd) || noise_sd < 0) {
        throw Error(ErrorCode::ConfigError, "brightness must exceed three noise standard deviations");
    }
    AtomImage img;
    img.width = grid.cols() * ppc;
    img.height = grid.rows() * ppc;
    img.pixels.assign(std::size_t{img.width} * img.height, 0);

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1.0);
    for (std::uint32_t y = 0; y < img.height; ++y) {
        for (std::uint32_t x = 0; x < img.width; ++x) {
            double v = 0.0;
            if (grid.occupied({y / ppc, x / ppc})) v = spot(brightness, ppc, x % ppc, y % ppc);
            if (noise_sd > 0) v += noise(gen);
            v = std::clamp(std::round(v), 0.0, 65535.0);
            img.pixels[std::size_t{y} * img.width + x] = static_cast<std::uint16_t>(v);
        }
    }
    return img;
}

AtomGrid detect(const AtomImage& image, std::uint32_t rows, std::uint32_t cols, double threshold) {
    if (rows == 0 || cols == 0 || image.width % cols != 0 || image.height % rows != 0 ||
        image.width / cols != image.height / rows || image.pixels.size() != std::size_t{image.width} * image.height) {
        throw Error(ErrorCode::GeometryMismatch, std::to_string(rows) + "x" + std::to_string(cols) +
                                                     " grid does not tile a " + std::to_string(image.width) + "x" +
                                                     std::to_string(image.height) + " image");
    }
    const std::uint32_t ppc = image.width / cols;
    std::vector<double> sums(std::size_t{rows} * cols, 0.0);
    for (std::uint32_t y = 0; y < image.height; ++y) {
        for (std::uint32_t x = 0; x < image.width; ++x) {
            sums[std::size_t{y / ppc} * cols + x / ppc] += image.at(x, y);
        }
    }
    AtomGrid grid(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) grid.set({r, c}, sums[std::size_t{r} * cols + c] > threshold);
    }
    return grid;
}

TargetPattern TargetPattern::dense_rectangle(std::uint32_t rows, std::uint32_t cols, std::size_t count) {
    TargetPattern t;
    if (count == 0) return t;
    auto width = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    if (rows > 0) width = std::max(width, static_cast<std::uint32_t>((count + rows - 1) / rows));
    width = std::min(width, cols);
    if (width == 0 || (count + width - 1) / width > rows) {
        throw Error(ErrorCode::GeometryMismatch,
                    "target of " + std::to_string(count) + " sites does not fit a " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " grid");
    }
    for (std::size_t i = 0; i < count; ++i) {
        t.sites.push_back({static_cast<std::uint32_t>(i / width), static_cast<std::uint32_t>(i % width)});
    }
    return t;
}

TargetPattern TargetPattern::parse(std::string_view text, std::uint32_t& rows, std::uint32_t& cols) {
    TargetPattern t;
    rows = 0;
    cols = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (rows == 0) cols = static_cast<std::uint32_t>(line.size());
        if (line.size() != cols) throw Error(ErrorCode::ConfigError, "ragged target pattern row " + std::to_string(rows));
        for (std::uint32_t c = 0; c < cols; ++c) {
            if (line[c] == '#') {
                t.sites.push_back({rows, c});
            } else if (line[c] != '.') {
                throw Error(ErrorCode::ConfigError, std::string("unexpected character '") + line[c] +
                                                        "' in target pattern");
            }
        }
        ++rows;
    }
    return t;
}

std::uint64_t SortPlan::cost() const {
    std::uint64_t total = 0;
    for (const auto& m : moves) total += manhattan(m.from, m.to);
    return total;
}

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return {};
    const std::size_t m = cost[0].size();
    if (m < n) throw Error(ErrorCode::InsufficientAtoms, "assignment needs at least as many columns as rows");
    constexpr auto kInf = std::numeric_limits<std::int64_t>::max() / 4;
    // Potentials formulation, 1-based with a virtual column 0.
    std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0);
    std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> minv(m + 1, kInf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = owner[j0];
            std::int64_t delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (owner[j] != 0) assignment[owner[j] - 1] = j - 1;
    }
    return assignment;
}

SortPlan plan_sort(const AtomGrid& grid, const TargetPattern& target) {
    std::set<Site> required(target.sites.begin(), target.sites.end());
    for (const auto& s : required) {
        if (!grid.contains(s)) throw Error(ErrorCode::GeometryMismatch, "target site outside the grid");
    }
    if (grid.count() < required.size()) {
        throw Error(ErrorCode::InsufficientAtoms, std::to_string(grid.count()) + " atoms cannot fill " +
                                                      std::to_string(required.size()) + " target sites");
    }
    std::vector<Site> holes;
    for (const auto& s : required) {
        if (!grid.occupied(s)) holes.push_back(s);
    }
    std::vector<Site> surplus;
    for (const auto& s : grid.occupied_sites()) {
        if (!required.contains(s)) surplus.push_back(s);
    }
    SortPlan plan;
    if (holes.empty()) return plan;

    std::vector<std::vector<std::int64_t>> cost(holes.size(), std::vector<std::int64_t>(surplus.size()));
    for (std::size_t i = 0; i < holes.size(); ++i) {
        for (std::size_t j = 0; j < surplus.size(); ++j) cost[i][j] = manhattan(holes[i], surplus[j]);
    }
    auto assignment = min_cost_assignment(cost);
    // Sources lie outside the target and destinations are empty target
    // sites, so every move is legal regardless of order; emit them in
    // row-major order of the destination.
    for (std::size_t i = 0; i < holes.size(); ++i) plan.moves.push_back({surplus[assignment[i]], holes[i]});
    return plan;
}

void apply_plan(AtomGrid& grid, const SortPlan& plan) {
    for (std::size_t i = 0; i < plan.moves.size(); ++i) {
        const auto& m = plan.moves[i];
        if (!grid.contains(m.from) || !grid.contains(m.to) || !grid.occupied(m.from) || grid.occupied(m.to)) {
            throw Error(ErrorCode::InvalidProgram, "illegal move " + std::to_string(i) + " in sort plan");
        }
        grid.set(m.from, false);
        grid.set(m.to, true);
    }
}

bool satisfies(const AtomGrid& grid, const TargetPattern& target) {
    return std::all_of(target.sites.begin(), target.sites.end(),
                       [&](Site s) { return grid.contains(s) && grid.occupied(s); });
}

std::vector<AwgRecord> emit_moves(const SortPlan& plan) {
    std::vector<AwgRecord> out;
    out.reserve(plan.moves.size());
    for (const auto& m : plan.moves) {
        AwgRecord r;
        r.pickup = m.from;
        r.drop = m.to;
        r.x = {kBaseMhz + kSpacingMhz * m.from.col, kBaseMhz + kSpacingMhz * m.to.col};
        r.y = {kBaseMhz + kSpacingMhz * m.from.row, kBaseMhz + kSpacingMhz * m.to.row};
        r.duration_us = kMicrosPerSite * manhattan(m.from, m.to);
        out.push_back(r);
    }
    return out;
}

std::string to_pgm(const AtomImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n65535\n";
    out.reserve(out.size() + image.pixels.size() * 2);
    for (auto p : image.pixels) {
        out.push_back(static_cast<char>(p >> 8));  // PGM is big-endian
        out.push_back(static_cast<char>(p & 0xFF));
    }
    return out;
}

std::string to_json_lines(const std::vector<AwgRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::json j{
            {"pickup", {r.pickup.row, r.pickup.col}},
            {"drop", {r.drop.row, r.drop.col}},
            {"x_ramp_mhz", {r.x.start_mhz, r.x.stop_mhz}},
            {"y_ramp_mhz", {r.y.start_mhz, r.y.stop_mhz}},
            {"duration_us", r.duration_us},
        };
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace uqp::atoms
