#include "ftsdos/output.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace ftsdos {

namespace fs = std::filesystem;

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content)
{
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string trajectory_csv(const SimLog& log)
{
    std::vector<int> events(log.rows(), 0);
    std::vector<int> sent(log.rows(), 0);
    for (const EventRecord& e : log.events) {
        if (e.row < log.rows()) {
            ++events[e.row];
            sent[e.row] += e.transmitted ? 1 : 0;
        }
    }

    std::string out = "t";
    for (int i = 1; i <= log.state_dim; ++i) {
        out += ",x_" + std::to_string(i);
    }
    for (int i = 1; i <= log.input_dim; ++i) {
        out += ",u_" + std::to_string(i);
    }
    out += ",V,err_norm,denied,event,transmitted\n";

    for (std::size_t r = 0; r < log.rows(); ++r) {
        out += format_real(log.times[r]);
        for (int i = 0; i < log.state_dim; ++i) {
            out += ',' + format_real(log.states[r](i));
        }
        for (int i = 0; i < log.input_dim; ++i) {
            out += ',' + format_real(log.inputs[r](i));
        }
        out += ',' + format_real(log.lyapunov[r]);
        out += ',' + format_real(log.error_norm[r]);
        out += ',' + std::to_string(int(log.denied[r]));
        out += ',' + std::to_string(events[r]);
        out += ',' + std::to_string(sent[r]);
        out += '\n';
    }
    return out;
}

std::string events_csv(const SimLog& log)
{
    std::string out = "k,t,transmitted,during_dos,row";
    for (int i = 1; i <= log.state_dim; ++i) {
        out += ",x_" + std::to_string(i);
    }
    out += '\n';
    for (std::size_t k = 0; k < log.events.size(); ++k) {
        const EventRecord& e = log.events[k];
        out += std::to_string(k) + ',' + format_real(e.t) + ',' + (e.transmitted ? "1" : "0") + ',' +
               (e.during_dos ? "1" : "0") + ',' + std::to_string(e.row);
        for (int i = 0; i < log.state_dim; ++i) {
            out += ',' + format_real(e.state(i));
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string trajectory_svg(const SimLog& log, const DosSchedule& schedule, const std::string& title)
{
    constexpr double width = 900, height = 360;
    constexpr double left = 60, right = 20, top = 30, bottom = 40;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const double t_max = log.horizon > 0.0 ? log.horizon : 1.0;
    double y_min = 0.0, y_max = 0.0;
    for (const Vector& x : log.states) {
        for (int i = 0; i < x.size(); ++i) {
            if (std::isfinite(x(i))) {
                y_min = std::min(y_min, x(i));
                y_max = std::max(y_max, x(i));
            }
        }
    }
    if (y_max - y_min < 1e-12) {
        y_max = y_min + 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const auto px = [&](double t) { return left + plot_w * t / t_max; };
    const auto py = [&](double y) { return top + plot_h * (y_max - y) / (y_max - y_min); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title
        << "</text>\n";

    for (const DosInterval& h : schedule.intervals()) {
        const double a = std::min(h.start, t_max), b = std::min(h.end(), t_max);
        svg << "<rect x=\"" << fixed(px(a)) << "\" y=\"" << top << "\" width=\"" << fixed(px(b) - px(a))
            << "\" height=\"" << plot_h << "\" fill=\"#bbbbbb\" fill-opacity=\"0.5\"/>\n";
    }

    svg << "<line x1=\"" << left << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << left + plot_w << "\" y2=\""
        << fixed(py(0)) << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (const EventRecord& e : log.events) {
        if (e.state.size() == 0 || !std::isfinite(e.state(0))) {
            continue;
        }
        const char* color = e.transmitted ? "#1f77b4" : "#d62728";
        svg << "<line x1=\"" << fixed(px(e.t)) << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << fixed(px(e.t))
            << "\" y2=\"" << fixed(py(e.state(0))) << "\" stroke=\"" << color << "\" stroke-width=\"0.8\"/>\n";
        svg << "<circle cx=\"" << fixed(px(e.t)) << "\" cy=\"" << fixed(py(e.state(0))) << "\" r=\"2\" fill=\""
            << color << "\"/>\n";
    }

    const std::size_t stride = std::max<std::size_t>(1, log.rows() / 2000);
    for (int i = 0; i < log.state_dim; ++i) {
        svg << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"";
        for (std::size_t r = 0; r < log.rows(); r += stride) {
            if (std::isfinite(log.states[r](i))) {
                svg << fixed(px(log.times[r])) << ',' << fixed(py(log.states[r](i))) << ' ';
            }
        }
        if (log.rows() > 0 && std::isfinite(log.states.back()(i))) {
            svg << fixed(px(log.times.back())) << ',' << fixed(py(log.states.back()(i)));
        }
        svg << "\"/>\n";
    }

    for (int k = 0; k <= 5; ++k) {
        const double t = t_max * k / 5.0;
        svg << "<text x=\"" << fixed(px(t)) << "\" y=\"" << height - 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fixed(t) << "</text>\n";
    }
    for (double y : {y_min + pad, 0.0, y_max - pad}) {
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(y) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fixed(y) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 4
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">t [s]</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

double to_real(const std::string& s, const fs::path& file)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        if (s == "nan" || s == "-nan") {
            return std::nan("");
        }
        throw std::runtime_error(file.string() + ": bad number '" + s + "'");
    }
}

std::vector<std::vector<std::string>> read_rows(const fs::path& file, std::vector<std::string>& header)
{
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot read " + file.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(file.string() + ": missing header");
    }
    header = split(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        rows.push_back(split(line));
        if (rows.back().size() != header.size()) {
            throw std::runtime_error(file.string() + ": row " + std::to_string(rows.size()) +
                                     " has wrong column count");
        }
    }
    return rows;
}

}  // namespace

SimLog read_logs(const fs::path& trajectory_path, const fs::path& events_path)
{
    SimLog log;
    std::vector<std::string> header;
    const auto rows = read_rows(trajectory_path, header);
    const auto count = [&](const std::string& prefix) {
        return static_cast<int>(std::count_if(header.begin(), header.end(), [&](const std::string& h) {
            return h.rfind(prefix, 0) == 0;
        }));
    };
    log.state_dim = count("x_");
    log.input_dim = count("u_");
    const std::size_t expected = 1 + log.state_dim + log.input_dim + 5;
    if (header.empty() || header.front() != "t" || header.size() != expected || log.state_dim == 0) {
        throw std::runtime_error(trajectory_path.string() + ": unexpected header");
    }
    const int n = log.state_dim, m = log.input_dim;
    for (const auto& cells : rows) {
        log.times.push_back(to_real(cells[0], trajectory_path));
        Vector x(n), u(m);
        for (int i = 0; i < n; ++i) {
            x(i) = to_real(cells[1 + i], trajectory_path);
        }
        for (int i = 0; i < m; ++i) {
            u(i) = to_real(cells[1 + n + i], trajectory_path);
        }
        log.states.push_back(x);
        log.inputs.push_back(u);
        log.lyapunov.push_back(to_real(cells[1 + n + m], trajectory_path));
        log.error_norm.push_back(to_real(cells[2 + n + m], trajectory_path));
        log.denied.push_back(cells[3 + n + m] == "1" ? 1 : 0);
    }
    if (log.rows() > 1) {
        log.step = log.times[1] - log.times[0];
        log.horizon = log.times.back();
    }

    std::vector<std::string> ev_header;
    const auto ev_rows = read_rows(events_path, ev_header);
    if (ev_header.size() != static_cast<std::size_t>(5 + n)) {
        throw std::runtime_error(events_path.string() + ": unexpected header");
    }
    for (const auto& cells : ev_rows) {
        EventRecord e;
        e.t = to_real(cells[1], events_path);
        e.transmitted = cells[2] == "1";
        e.during_dos = cells[3] == "1";
        e.row = static_cast<std::size_t>(std::stoull(cells[4]));
        e.state = Vector(n);
        for (int i = 0; i < n; ++i) {
            e.state(i) = to_real(cells[5 + i], events_path);
        }
        if (!log.events.empty()) {
            log.min_inter_event = std::min(log.min_inter_event, e.t - log.events.back().t);
        }
        log.events.push_back(e);
    }
    return log;
}

}  // namespace ftsdos
