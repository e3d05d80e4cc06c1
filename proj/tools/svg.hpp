#pragma once

#include <string>
#include <vector>

namespace radcav::cli {

// Minimal line-plot writer. Collects curves in data coordinates and renders a
// self-contained SVG with auto-fitted axes and 1-2-5 tick placement.
class SvgFigure {
 public:
  SvgFigure(std::string title, std::string xlabel, std::string ylabel,
            int width = 720, int height = 480);

  void add_polyline(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& label);
  void add_markers(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& label);
  void add_hline(double y, const std::string& label);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Curve {
    std::vector<double> x, y;
    std::string label;
    bool markers = false;
  };
  struct HLine {
    double y;
    std::string label;
  };

  std::string title_, xlabel_, ylabel_;
  int width_, height_;
  std::vector<Curve> curves_;
  std::vector<HLine> hlines_;
};

}  // namespace radcav::cli
