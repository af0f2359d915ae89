#include <array>
#include <string>

#include "rair/error.hpp"
#include "rair/gridworld.hpp"

namespace rair {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kBackground{245, 245, 240};
constexpr Rgb kGridLine{215, 215, 210};
constexpr Rgb kUncolored{40, 90, 170};
constexpr Rgb kFrozen{60, 60, 60};
constexpr std::array<Rgb, 16> kPalette{{{31, 119, 180},
                                        {255, 127, 14},
                                        {44, 160, 44},
                                        {214, 39, 40},
                                        {148, 103, 189},
                                        {140, 86, 75},
                                        {227, 119, 194},
                                        {127, 127, 127},
                                        {188, 189, 34},
                                        {23, 190, 207},
                                        {174, 199, 232},
                                        {255, 187, 120},
                                        {152, 223, 138},
                                        {255, 152, 150},
                                        {197, 176, 213},
                                        {196, 156, 148}}};

void check_extent(const Configuration& state, int width, int height) {
  if (width <= 0 || height <= 0) throw Error("render extent must be positive");
  for (const auto& c : state.positions) {
    if (c.col < 0 || c.row < 0 || c.col >= width || c.row >= height) throw Error("entity outside render extent");
  }
}

}  // namespace

std::string render_ascii(const Configuration& state, int width, int height) {
  check_extent(state, width, height);
  std::string grid(static_cast<std::size_t>(height) * (width + 1), '.');
  for (int r = 0; r < height; ++r) grid[static_cast<std::size_t>(r) * (width + 1) + width] = '\n';
  for (std::size_t i = 0; i < state.size(); ++i) {
    char ch = 'o';
    if (state.frozen[i]) ch = '#';
    else if (!state.colors.empty()) ch = static_cast<char>('A' + state.colors[i]);
    grid[static_cast<std::size_t>(state.positions[i].row) * (width + 1) + state.positions[i].col] = ch;
  }
  return grid;
}

std::vector<std::uint8_t> render_ppm(const Configuration& state, int width, int height, int cell_px) {
  check_extent(state, width, height);
  if (cell_px < 3) throw Error("cell_px must be at least 3");
  const int w = width * cell_px;
  const int h = height * cell_px;
  const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(w) * h * 3);
  auto put = [&](int x, int y, const Rgb& c) {
    const std::size_t at = base + (static_cast<std::size_t>(y) * w + x) * 3;
    out[at] = c[0];
    out[at + 1] = c[1];
    out[at + 2] = c[2];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) put(x, y, (x % cell_px == 0 || y % cell_px == 0) ? kGridLine : kBackground);
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    Rgb color = kUncolored;
    if (state.frozen[i]) color = kFrozen;
    else if (!state.colors.empty()) color = kPalette[static_cast<std::size_t>(state.colors[i]) % kPalette.size()];
    // filled disc inside the cell
    const double r = (cell_px - 2) / 2.0;
    const double cx = state.positions[i].col * cell_px + cell_px / 2.0;
    const double cy = state.positions[i].row * cell_px + cell_px / 2.0;
    for (int y = state.positions[i].row * cell_px + 1; y < (state.positions[i].row + 1) * cell_px; ++y) {
      for (int x = state.positions[i].col * cell_px + 1; x < (state.positions[i].col + 1) * cell_px; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) put(x, y, color);
      }
    }
  }
  return out;
}

}  // namespace rair
