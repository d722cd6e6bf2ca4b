#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "scgan/corpus.hpp"
#include "scgan/image.hpp"
#include "scgan/trainer.hpp"

namespace scgan {

inline std::vector<MetricsRow> parse_metrics_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics log: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != metrics_csv_header())
    throw IoError("malformed metrics log header: " + path.string());

  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::array<real, 11> f{};
    std::string cell;
    std::size_t i = 0;
    for (; i < f.size() && std::getline(ls, cell, ','); ++i) {
      std::size_t used = 0;
      try {
        f[i] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size())
        throw IoError("malformed metrics value '" + cell + "' in " +
                      path.string());
    }
    if (i != f.size())
      throw IoError("short metrics row in " + path.string());
    MetricsRow r;
    r.epoch = static_cast<int>(f[0]);
    r.step = static_cast<int>(f[1]);
    r.losses = {f[2], f[3], f[4], f[5], f[6], f[7]};
    r.w1 = f[8];
    r.w2 = f[9];
    r.w3 = f[10];
    rows.push_back(r);
  }
  return rows;
}

struct Rgb {
  real r = 0.0, g = 0.0, b = 0.0;
};

inline ImagePatch make_canvas(int h, int w, Rgb bg = {255.0, 255.0, 255.0}) {
  ImagePatch img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(0, y, x) = bg.r;
      img.at(1, y, x) = bg.g;
      img.at(2, y, x) = bg.b;
    }
  return img;
}

inline void put_pixel(ImagePatch& img, int y, int x, Rgb c) {
  if (y < 0 || x < 0 || y >= img.height() || x >= img.width()) return;
  img.at(0, y, x) = c.r;
  img.at(1, y, x) = c.g;
  img.at(2, y, x) = c.b;
}

inline void draw_line(ImagePatch& img, int y0, int x0, int y1, int x1,
                      Rgb c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    put_pixel(img, y0, x0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace detail {

// 5x7 glyphs, one byte per row, low 5 bits used, MSB-side leftmost.
inline std::array<std::uint8_t, 7> glyph_rows(char ch) {
  switch (ch) {
    case '0': return {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E};
    case '1': return {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E};
    case '2': return {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F};
    case '3': return {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E};
    case '4': return {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02};
    case '5': return {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E};
    case '6': return {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E};
    case '7': return {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08};
    case '8': return {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E};
    case '9': return {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C};
    case 'a': return {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F};
    case 'b': return {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x1E};
    case 'c': return {0x00, 0x00, 0x0E, 0x10, 0x10, 0x11, 0x0E};
    case 'd': return {0x01, 0x01, 0x0D, 0x13, 0x11, 0x11, 0x0F};
    case 'e': return {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E};
    case 'f': return {0x06, 0x09, 0x08, 0x1C, 0x08, 0x08, 0x08};
    case 'g': return {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E};
    case 'h': return {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11};
    case 'i': return {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E};
    case 'j': return {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0C};
    case 'k': return {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12};
    case 'l': return {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E};
    case 'm': return {0x00, 0x00, 0x1A, 0x15, 0x15, 0x11, 0x11};
    case 'n': return {0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11};
    case 'o': return {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E};
    case 'p': return {0x00, 0x00, 0x1E, 0x11, 0x1E, 0x10, 0x10};
    case 'q': return {0x00, 0x00, 0x0D, 0x13, 0x0F, 0x01, 0x01};
    case 'r': return {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10};
    case 's': return {0x00, 0x00, 0x0E, 0x10, 0x0E, 0x01, 0x1E};
    case 't': return {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06};
    case 'u': return {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D};
    case 'v': return {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04};
    case 'w': return {0x00, 0x00, 0x11, 0x11, 0x15, 0x15, 0x0A};
    case 'x': return {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11};
    case 'y': return {0x00, 0x00, 0x11, 0x11, 0x0F, 0x01, 0x0E};
    case 'z': return {0x00, 0x00, 0x1F, 0x02, 0x04, 0x08, 0x1F};
    case '.': return {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C};
    case ',': return {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08};
    case '-': return {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00};
    case '+': return {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00};
    case '_': return {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F};
    case ':': return {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00};
    case '/': return {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10};
    case '=': return {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00};
    case '(': return {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02};
    case ')': return {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08};
    case '%': return {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03};
    default: return {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00};
  }
}

}  // namespace detail

// Uppercase input is lowered; glyphs outside the set render blank.
inline void draw_text(ImagePatch& img, int y, int x, const std::string& text,
                      Rgb c = {0.0, 0.0, 0.0}) {
  int cx = x;
  for (char raw : text) {
    const char ch =
        raw >= 'A' && raw <= 'Z' ? static_cast<char>(raw - 'A' + 'a') : raw;
    const auto rows = detail::glyph_rows(ch);
    for (int ry = 0; ry < 7; ++ry)
      for (int rx = 0; rx < 5; ++rx)
        if (rows[ry] >> (4 - rx) & 1) put_pixel(img, y + ry, cx + rx, c);
    cx += 6;
  }
}

struct CurveSpec {
  std::string label;
  std::vector<real> values;
  Rgb color;
};

namespace detail {

inline std::string short_number(real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace detail

inline ImagePatch render_curves(const std::vector<CurveSpec>& curves,
                                int h = 320, int w = 640) {
  check(h >= 80 && w >= 160, "render_curves: canvas too small");
  ImagePatch img = make_canvas(h, w);
  const int left = 56, right = w - 12, top = 12, bottom = h - 24;
  const Rgb axis{120.0, 120.0, 120.0};
  draw_line(img, top, left, bottom, left, axis);
  draw_line(img, bottom, left, bottom, right, axis);

  real lo = std::numeric_limits<real>::infinity();
  real hi = -std::numeric_limits<real>::infinity();
  std::size_t max_n = 0;
  for (const auto& c : curves) {
    max_n = std::max(max_n, c.values.size());
    for (real v : c.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (max_n == 0 || !std::isfinite(lo)) {
    draw_text(img, h / 2, left + 8, "no data");
    return img;
  }
  if (hi == lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  const real pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto ypix = [&](real v) {
    const real t = (v - lo) / (hi - lo);
    return bottom - static_cast<int>(std::lround(t * (bottom - top)));
  };
  auto xpix = [&](std::size_t i) {
    if (max_n == 1) return left;
    return left + static_cast<int>(std::lround(
                      static_cast<real>(i) / static_cast<real>(max_n - 1) *
                      (right - left)));
  };

  draw_text(img, top - 4, 2, detail::short_number(hi), axis);
  draw_text(img, bottom - 3, 2, detail::short_number(lo), axis);
  draw_text(img, bottom + 6, left, "0", axis);
  draw_text(img, bottom + 6, right - 30,
            detail::short_number(static_cast<real>(max_n - 1)), axis);

  int legend_y = top + 2;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i + 1 < c.values.size(); ++i) {
      if (!std::isfinite(c.values[i]) || !std::isfinite(c.values[i + 1]))
        continue;
      draw_line(img, ypix(c.values[i]), xpix(i), ypix(c.values[i + 1]),
                xpix(i + 1), c.color);
    }
    if (c.values.size() == 1 && std::isfinite(c.values[0]))
      put_pixel(img, ypix(c.values[0]), xpix(0), c.color);
    draw_text(img, legend_y, left + 8, c.label, c.color);
    legend_y += 9;
  }
  return img;
}

inline ImagePatch render_loss_curves(const std::vector<MetricsRow>& rows,
                                     int h = 320, int w = 640) {
  std::vector<CurveSpec> curves(6);
  curves[0] = {"l_gan_d", {}, {200.0, 40.0, 40.0}};
  curves[1] = {"l_gan_g", {}, {40.0, 80.0, 200.0}};
  curves[2] = {"l_clean", {}, {40.0, 160.0, 60.0}};
  curves[3] = {"l_pn", {}, {220.0, 140.0, 30.0}};
  curves[4] = {"l_rec", {}, {150.0, 60.0, 180.0}};
  curves[5] = {"total_g", {}, {0.0, 0.0, 0.0}};
  for (const auto& r : rows) {
    curves[0].values.push_back(r.losses.l_gan_d);
    curves[1].values.push_back(r.losses.l_gan_g);
    curves[2].values.push_back(r.losses.l_clean);
    curves[3].values.push_back(r.losses.l_pn);
    curves[4].values.push_back(r.losses.l_rec);
    curves[5].values.push_back(r.losses.total_g);
  }
  return render_curves(curves, h, w);
}

// Noise values straddle zero; shifting by mid-gray makes the map printable.
inline ImagePatch visualize_noise(const NoiseMap& map, real offset = 128.0) {
  ImagePatch out(map.height(), map.width(), map.channels());
  for (std::size_t i = 0; i < map.size(); ++i)
    out[i] = clamp(map[i] + offset, 0.0, 255.0);
  return out;
}

// Rows of cells composed onto one canvas; gray cells are replicated to RGB
// when any cell is color. Cell sizes may differ per row and column.
inline ImagePatch make_image_grid(
    const std::vector<std::vector<ImagePatch>>& rows, int margin = 4,
    real bg = 255.0) {
  check(!rows.empty(), "make_image_grid: no rows");
  std::size_t cols = 0;
  int channels = 1;
  for (const auto& row : rows) {
    check(!row.empty(), "make_image_grid: empty row");
    cols = std::max(cols, row.size());
    for (const auto& cell : row) channels = std::max(channels, cell.channels());
  }
  std::vector<int> row_h(rows.size(), 0), col_w(cols, 0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      row_h[r] = std::max(row_h[r], rows[r][c].height());
      col_w[c] = std::max(col_w[c], rows[r][c].width());
    }

  int total_h = margin, total_w = margin;
  for (int hh : row_h) total_h += hh + margin;
  for (int ww : col_w) total_w += ww + margin;

  ImagePatch out(total_h, total_w, channels);
  out.fill(bg);
  int oy = margin;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int ox = margin;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const ImagePatch& cell = rows[r][c];
      for (int ch = 0; ch < channels; ++ch) {
        const int src_ch = cell.channels() == channels ? ch : 0;
        for (int y = 0; y < cell.height(); ++y)
          for (int x = 0; x < cell.width(); ++x)
            out.at(ch, oy + y, ox + x) = cell.at(src_ch, y, x);
      }
      ox += col_w[c] + margin;
    }
    oy += row_h[r] + margin;
  }
  return out;
}

struct ReportSampleSet {
  std::string title;
  std::vector<ImagePatch> noisy;
  std::vector<NoiseMap> extracted;
  std::vector<ImagePatch> estimates;  // may be empty; derived when so
};

struct ReportInputs {
  std::vector<MetricsRow> metrics;
  std::vector<ReportSampleSet> samples;
  json summary;  // null when absent
};

namespace detail {

inline std::string html_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string summary_table_html(const json& summary) {
  std::ostringstream os;
  os << "<table>\n<tr><th>variant</th>";
  std::vector<std::string> columns;
  for (const auto& [name, fields] : summary.items()) {
    (void)name;
    for (const auto& [key, value] : fields.items()) {
      (void)value;
      columns.push_back(key);
    }
    break;
  }
  for (const auto& col : columns) os << "<th>" << html_escape(col) << "</th>";
  os << "</tr>\n";
  for (const auto& [name, fields] : summary.items()) {
    os << "<tr><td>" << html_escape(name) << "</td>";
    for (const auto& col : columns) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g",
                    fields.at(col).get<double>());
      os << "<td>" << buf << "</td>";
    }
    os << "</tr>\n";
  }
  os << "</table>\n";
  return os.str();
}

}  // namespace detail

// Static, deterministic report: identical inputs give byte-identical files.
inline void write_report(const std::filesystem::path& dir,
                         const ReportInputs& in) {
  std::filesystem::create_directories(dir);
  std::ostringstream html;
  html << "<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>training report</title>\n"
       << "<style>body{font-family:sans-serif;margin:2em;}"
       << "table{border-collapse:collapse;}"
       << "td,th{border:1px solid #999;padding:4px 8px;}</style>\n"
       << "</head>\n<body>\n<h1>training report</h1>\n";

  html << "<section>\n<h2>loss curves</h2>\n";
  if (in.metrics.empty()) {
    html << "<p>no data</p>\n";
  } else {
    save_patch(render_loss_curves(in.metrics), dir / "loss_curves.png");
    html << "<p>" << in.metrics.size() << " logged steps, final epoch "
         << in.metrics.back().epoch << "</p>\n"
         << "<img src=\"loss_curves.png\" alt=\"loss curves\">\n";
  }
  html << "</section>\n";

  html << "<section>\n<h2>samples</h2>\n";
  if (in.samples.empty()) {
    html << "<p>no data</p>\n";
  } else {
    for (std::size_t s = 0; s < in.samples.size(); ++s) {
      const auto& set = in.samples[s];
      check(set.noisy.size() == set.extracted.size(),
            "write_report: noisy and extracted counts differ");
      check(set.estimates.empty() || set.estimates.size() == set.noisy.size(),
            "write_report: estimate count mismatch");
      std::vector<std::vector<ImagePatch>> grid;
      for (std::size_t i = 0; i < set.noisy.size(); ++i) {
        std::vector<ImagePatch> row;
        row.push_back(set.noisy[i]);
        row.push_back(visualize_noise(set.extracted[i]));
        if (!set.estimates.empty()) {
          row.push_back(set.estimates[i]);
        } else {
          ImagePatch est(set.noisy[i].height(), set.noisy[i].width(),
                         set.noisy[i].channels());
          for (std::size_t k = 0; k < est.size(); ++k)
            est[k] = clamp(set.noisy[i][k] - set.extracted[i][k], 0.0, 255.0);
          row.push_back(est);
        }
        grid.push_back(std::move(row));
      }
      char name[64];
      std::snprintf(name, sizeof(name), "samples_%02zu.png", s);
      save_patch(make_image_grid(grid), dir / name);
      html << "<h3>" << detail::html_escape(set.title) << "</h3>\n"
           << "<p>columns: noisy / extracted noise (mid-gray shifted) / "
              "clean estimate</p>\n"
           << "<img src=\"" << name << "\" alt=\"sample grid\">\n";
    }
  }
  html << "</section>\n";

  html << "<section>\n<h2>summary</h2>\n";
  if (in.summary.is_null() || in.summary.empty()) {
    html << "<p>no data</p>\n";
  } else {
    html << detail::summary_table_html(in.summary);
  }
  html << "</section>\n</body>\n</html>\n";

  detail::write_file(dir / "report.html", html.str());
}

}  // namespace scgan
