#include "clm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "clm/io.hpp"

namespace clm::svg {

namespace {

struct Box {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();

    void add(const Vec2& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    void pad(double frac) {
        const double dx = std::max(1e-9, (xmax - xmin) * frac);
        const double dy = std::max(1e-9, (ymax - ymin) * frac);
        xmin -= dx;
        xmax += dx;
        ymin -= dy;
        ymax += dy;
    }
};

class Mapper {
public:
    Mapper(const Box& b, int w, int h, int margin)
        : b_(b), w_(w), h_(h), m_(margin) {}
    double x(double v) const {
        return m_ + (v - b_.xmin) / (b_.xmax - b_.xmin) * (w_ - 2 * m_);
    }
    double y(double v) const {
        return h_ - m_ - (v - b_.ymin) / (b_.ymax - b_.ymin) * (h_ - 2 * m_);
    }

private:
    Box b_;
    int w_, h_, m_;
};

void header(std::ostringstream& out, int w, int h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string trajectory_plot(const std::vector<Series>& series, const std::vector<Marker>& markers,
                            int width, int height) {
    Box box;
    for (const auto& s : series)
        for (const auto& p : s.points) box.add(p);
    for (const auto& m : markers) box.add(m.at);
    if (!std::isfinite(box.xmin)) box = Box{0, 1, 0, 1};
    box.pad(0.06);
    Mapper map(box, width, height, 48);

    std::ostringstream out;
    out.precision(7);
    header(out, width, height);
    int label_y = 20;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : s.points) out << map.x(p.x) << ',' << map.y(p.y) << ' ';
        if (s.close && !s.points.empty())
            out << map.x(s.points.front().x) << ',' << map.y(s.points.front().y);
        out << "\"/>\n";
        out << "<text x=\"56\" y=\"" << label_y << "\" fill=\"" << s.color
            << "\" font-size=\"13\">" << s.label << "</text>\n";
        label_y += 16;
    }
    for (const auto& m : markers) {
        out << "<circle cx=\"" << map.x(m.at.x) << "\" cy=\"" << map.y(m.at.y)
            << "\" r=\"4\" fill=\"" << m.color << "\"/>\n";
        out << "<text x=\"" << map.x(m.at.x) + 6 << "\" y=\"" << map.y(m.at.y) - 6
            << "\" font-size=\"12\" fill=\"" << m.color << "\">" << m.label << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string archive_scatter(const moo::ParetoArchive& a, std::optional<std::size_t> knee_index,
                            int width, int height) {
    Box box;
    for (const auto& ind : a.individuals)
        if (ind.objectives.size() >= 2) box.add({ind.objectives[0], ind.objectives[1]});
    if (!std::isfinite(box.xmin)) box = Box{0, 1, 0, 1};
    box.pad(0.08);
    Mapper map(box, width, height, 48);

    std::ostringstream out;
    out.precision(7);
    header(out, width, height);
    for (std::size_t i = 0; i < a.individuals.size(); ++i) {
        const auto& ind = a.individuals[i];
        if (ind.objectives.size() < 2) continue;
        const bool knee = knee_index && *knee_index == i;
        const char* fill = knee ? "#d62728" : (ind.rank == 0 ? "#1f77b4" : "#a0a0a0");
        out << "<circle cx=\"" << map.x(ind.objectives[0]) << "\" cy=\""
            << map.y(ind.objectives[1]) << "\" r=\"" << (knee ? 5 : 3) << "\" fill=\"" << fill
            << "\"/>\n";
    }
    out << "<text x=\"52\" y=\"18\" font-size=\"13\">" << a.provenance.subtask
        << " front (f1 vs f2 projection)</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write(const std::filesystem::path& path, const std::string& svg_text) {
    io::write_text_atomic(path, svg_text);
}

}  // namespace clm::svg
