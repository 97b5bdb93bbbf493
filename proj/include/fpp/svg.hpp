#pragma once

// Minimal SVG output for the experiment plots: a fixed-viewport canvas with
// world-to-pixel mapping (y axis up), polylines, markers, and text.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shape.hpp"

namespace fpp {

class SvgCanvas {
public:
    SvgCanvas(double xmin, double xmax, double ymin, double ymax, int width = 640,
              int height = 640)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), width_(width), height_(height)
    {
        if (!(xmax > xmin) || !(ymax > ymin))
            throw std::invalid_argument("SvgCanvas: empty world rectangle");
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& color, double stroke = 1.5,
                  bool close = false)
    {
        if (pts.size() < 2) return;
        body_ << (close ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << color
              << "\" stroke-width=\"" << stroke << "\" points=\"";
        for (const Vec2& p : pts) body_ << px(p.x) << ',' << py(p.y) << ' ';
        body_ << "\"/>\n";
    }

    void line(Vec2 a, Vec2 b, const std::string& color, double stroke = 1.0)
    {
        body_ << "<line x1=\"" << px(a.x) << "\" y1=\"" << py(a.y) << "\" x2=\"" << px(b.x)
              << "\" y2=\"" << py(b.y) << "\" stroke=\"" << color << "\" stroke-width=\""
              << stroke << "\"/>\n";
    }

    void circle(Vec2 c, double r_px, const std::string& color)
    {
        body_ << "<circle cx=\"" << px(c.x) << "\" cy=\"" << py(c.y) << "\" r=\"" << r_px
              << "\" fill=\"" << color << "\"/>\n";
    }

    void text(Vec2 at, const std::string& s, int size = 12)
    {
        body_ << "<text x=\"" << px(at.x) << "\" y=\"" << py(at.y) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\">" << s << "</text>\n";
    }

    void axes(const std::string& color = "#cccccc")
    {
        if (xmin_ < 0 && xmax_ > 0) line({0, ymin_}, {0, ymax_}, color);
        if (ymin_ < 0 && ymax_ > 0) line({xmin_, 0}, {xmax_, 0}, color);
    }

    std::string str() const
    {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

    void save(const std::string& path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("SvgCanvas: cannot open '" + path + "'");
        f << str();
    }

private:
    double px(double x) const { return (x - xmin_) / (xmax_ - xmin_) * (width_ - 40) + 20; }
    double py(double y) const { return (ymax_ - y) / (ymax_ - ymin_) * (height_ - 40) + 20; }

    double xmin_, xmax_, ymin_, ymax_;
    int width_, height_;
    std::ostringstream body_;
};

// Polar plot of the estimated shape boundary: the first-quadrant points are
// reflected through both axes to draw the full closed curve.
inline std::string shape_plot_svg(const ShapeEstimate& est)
{
    std::vector<Vec2> quadrant = shape_points(est);
    std::vector<Vec2> ring;
    for (const Vec2& p : quadrant) ring.push_back(p);
    for (auto it = quadrant.rbegin(); it != quadrant.rend(); ++it)
        ring.push_back({-it->x, it->y});
    for (const Vec2& p : quadrant) ring.push_back({-p.x, -p.y});
    for (auto it = quadrant.rbegin(); it != quadrant.rend(); ++it)
        ring.push_back({it->x, -it->y});

    double r = 0.0;
    for (const Vec2& p : ring) r = std::max(r, std::max(std::abs(p.x), std::abs(p.y)));
    r *= 1.15;
    SvgCanvas canvas(-r, r, -r, r);
    canvas.axes();
    canvas.polyline(ring, "#1f6feb", 1.5, true);
    for (const Vec2& p : ring) canvas.circle(p, 1.5, "#1f6feb");
    canvas.text({-r * 0.95, r * 0.92}, "estimated unit ball of the passage-time norm");
    return canvas.str();
}

// Trend plot: one marker per (n, value) with a vertical CI whisker.
inline std::string trend_plot_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& lo, const std::vector<double>& hi,
                                  const std::string& title)
{
    if (xs.empty() || xs.size() != ys.size() || xs.size() != lo.size() || xs.size() != hi.size())
        throw std::invalid_argument("trend_plot_svg: mismatched series");
    double xmax = *std::max_element(xs.begin(), xs.end());
    double ymax = *std::max_element(hi.begin(), hi.end());
    ymax = std::max(ymax, 1e-12);
    SvgCanvas canvas(-0.05 * xmax, xmax * 1.05, -0.05 * ymax, ymax * 1.15);
    canvas.axes("#999999");
    std::vector<Vec2> curve;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        curve.push_back({xs[i], ys[i]});
        canvas.line({xs[i], lo[i]}, {xs[i], hi[i]}, "#d29922", 1.0);
    }
    canvas.polyline(curve, "#1f6feb");
    for (const Vec2& p : curve) canvas.circle(p, 2.5, "#1f6feb");
    canvas.text({0.0, ymax * 1.1}, title);
    return canvas.str();
}

}  // namespace fpp
