#include "cck/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cck {

namespace {

std::string fmt(double v) {
  char buf[32];
  // Shortest representation that round-trips a double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trajectory& traj,
                     const std::vector<std::string>& state_names, int input_dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "t";
  for (const auto& n : state_names) out << "," << n;
  for (int j = 0; j < input_dim; ++j) out << ",u_" << j;
  out << ",contact_count,solve_ms\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt(traj.times[k]);
    for (long i = 0; i < traj.states[k].size(); ++i) out << "," << fmt(traj.states[k][i]);
    // Inputs and solver times are per-step; the final row repeats none.
    const bool has_u = k < traj.inputs.size();
    for (int j = 0; j < input_dim; ++j) out << "," << (has_u ? fmt(traj.inputs[k][j]) : "");
    out << "," << (k < traj.contact_counts.size() ? std::to_string(traj.contact_counts[k]) : "");
    out << "," << (k < traj.solver_ms.size() ? fmt(traj.solver_ms[k]) : "");
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Trajectory read_trace_csv(const std::string& path, int state_dim, int input_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace: " + path);
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(2 + state_dim + input_dim + 2);  // tolerate trailing empties
    traj.times.push_back(std::stod(cells[0]));
    VectorXd x(state_dim);
    for (int i = 0; i < state_dim; ++i) x[i] = std::stod(cells[1 + i]);
    traj.states.push_back(x);
    if (!cells[1 + state_dim].empty()) {
      VectorXd u(input_dim);
      for (int j = 0; j < input_dim; ++j) u[j] = std::stod(cells[1 + state_dim + j]);
      traj.inputs.push_back(u);
    }
    const std::string& cc = cells[1 + state_dim + input_dim];
    if (!cc.empty()) traj.contact_counts.push_back(std::stoi(cc));
    const std::string& sm = cells[2 + state_dim + input_dim];
    if (!sm.empty()) traj.solver_ms.push_back(std::stod(sm));
  }
  return traj;
}

namespace {

void polyline(std::ostream& out, const std::vector<double>& xs,
              const std::vector<double>& ys, double x0, double y0, double w, double h,
              const char* color) {
  double xmin = xs.front(), xmax = xs.back();
  double ymin = ys[0], ymax = ys[0];
  for (double y : ys) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 2000);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double px = x0 + w * (xs[i] - xmin) / (xmax - xmin);
    const double py = y0 + h - h * (ys[i] - ymin) / (ymax - ymin);
    out << px << "," << py << " ";
  }
  out << "\"/>\n";
}

}  // namespace

void write_trace_svg(const std::string& path, const Trajectory& traj, int x_index) {
  if (traj.states.empty()) throw std::runtime_error("empty trajectory");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  std::vector<double> disp, counts;
  const double x0 = traj.states.front()[x_index];
  for (const auto& x : traj.states) disp.push_back(x[x_index] - x0);
  for (int c : traj.contact_counts) counts.push_back(c);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  out << "<text x=\"10\" y=\"16\">x displacement [m]</text>\n";
  out << "<rect x=\"40\" y=\"24\" width=\"580\" height=\"150\" fill=\"none\" stroke=\"#999\"/>\n";
  polyline(out, traj.times, disp, 40, 24, 580, 150, "#1f6fb2");
  out << "<text x=\"10\" y=\"212\">spokes in contact</text>\n";
  out << "<rect x=\"40\" y=\"220\" width=\"580\" height=\"150\" fill=\"none\" stroke=\"#999\"/>\n";
  if (!counts.empty()) {
    std::vector<double> t(traj.times.begin(), traj.times.begin() + counts.size());
    polyline(out, t, counts, 40, 220, 580, 150, "#b2441f");
  }
  out << "</svg>\n";
}

}  // namespace cck
