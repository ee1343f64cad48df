#ifndef TONGUE_RASTER_HPP
#define TONGUE_RASTER_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace tongue {

/// Rectangle of the (a, b) parameter plane.
struct Window {
  double a_min = 0.0;
  double a_max = 1.0;
  double b_min = 0.5;
  double b_max = 1.0;

  bool valid() const { return a_max > a_min && b_max > b_min; }
};

/// Pixel-center sampling; row 0 is the top (b_max) edge.
struct Grid {
  Window window;
  int width = 1;
  int height = 1;

  double a_at(int col) const { return window.a_min + (col + 0.5) * (window.a_max - window.a_min) / width; }
  double b_at(int row) const { return window.b_max - (row + 0.5) * (window.b_max - window.b_min) / height; }

  /// Cell containing (a, b), clamped to the raster.
  std::pair<int, int> cell_of(double a, double b) const {
    auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
    const int col = static_cast<int>((a - window.a_min) / (window.a_max - window.a_min) * width);
    const int row = static_cast<int>((window.b_max - b) / (window.b_max - window.b_min) * height);
    return {clamp(row, height), clamp(col, width)};
  }
};

struct ComponentLabels {
  int width = 0;
  int height = 0;
  int count = 0;
  std::vector<int> label;  // -1 outside the set, else component id in scan order

  int at(int row, int col) const { return label[static_cast<std::size_t>(row) * width + col]; }
};

/// 4-connected components of {(row, col) : member(row, col)}.
template <class Member>
ComponentLabels label_components(int width, int height, Member&& member) {
  ComponentLabels out;
  out.width = width;
  out.height = height;
  out.label.assign(static_cast<std::size_t>(width) * height, -1);
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto idx = static_cast<std::size_t>(r) * width + c;
      if (out.label[idx] != -1 || !member(r, c)) continue;
      const int id = out.count++;
      out.label[idx] = id;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        constexpr int dy[] = {-1, 1, 0, 0};
        constexpr int dx[] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int ny = y + dy[k];
          const int nx = x + dx[k];
          if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
          const auto nidx = static_cast<std::size_t>(ny) * width + nx;
          if (out.label[nidx] != -1 || !member(ny, nx)) continue;
          out.label[nidx] = id;
          stack.emplace_back(ny, nx);
        }
      }
    }
  }
  return out;
}

}  // namespace tongue

#endif  // TONGUE_RASTER_HPP
