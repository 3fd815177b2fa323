// Convergence sweep driver: writes the error CSV and prints a summary.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "fdstokes/config.hpp"
#include "fdstokes/study.hpp"

using namespace fdstokes;

namespace {

// Bad-element counts reported for this setup elsewhere; depend on the mesh
// diagonal convention and the fraction computation, so only informational.
const std::map<int, int> kReferenceBadCounts{{40, 8}, {80, 8}, {160, 56}};

std::string matrix_path(const std::string& out, int n) {
  std::filesystem::path p(out);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "_n" + std::to_string(n) + ".mtx")).string();
}

void print_summary(const RunConfig& rc, const MethodConfig& m, const ErrorReport& report) {
  std::cout << "variant " << to_string(m.variant) << "  fe " << m.fe.label() << "  gamma0 " << m.gamma0
            << "  theta " << m.theta << "  gamma " << m.gamma << "  theta_min " << m.theta_min << "\n\n";
  std::cout << std::setw(5) << "n" << std::setw(10) << "unknowns" << std::setw(13) << "l2_u"
            << std::setw(13) << "h1_u" << std::setw(13) << "l2_p" << std::setw(13) << "lam_int"
            << std::setw(11) << "residual" << std::setw(5) << "bad";
  if (rc.probe_infsup) std::cout << std::setw(12) << "infsup";
  std::cout << '\n';
  for (const auto& r : report.rows) {
    std::cout << std::setw(5) << r.n << std::setw(10) << r.unknowns << std::scientific
              << std::setprecision(4) << std::setw(13) << r.l2_u << std::setw(13) << r.h1_u
              << std::setw(13) << r.l2_p << std::setw(13) << r.lam_int << std::setprecision(1)
              << std::setw(11) << r.residual << std::defaultfloat << std::setw(5) << r.bad_elements;
    if (rc.probe_infsup) std::cout << std::setw(12) << std::setprecision(5) << r.infsup;
    if (!r.ok) std::cout << "  FAILED: " << r.failure;
    if (r.singular) std::cout << "  singular: regularized least-squares solution";
    if (r.kernel_modes > 0) std::cout << "  structural kernel of dimension " << r.kernel_modes << " deflated";
    std::cout << '\n';
  }
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "\nslopes (least squares)  l2_u " << report.slopes[0] << "  h1_u " << report.slopes[1]
            << "  l2_p " << report.slopes[2] << "  lam_int " << report.slopes[3] << '\n';

  std::vector<const ErrorRow*> ok;
  for (const auto& r : report.rows) {
    if (r.ok) ok.push_back(&r);
  }
  for (std::size_t i = 1; i < ok.size(); ++i) {
    const auto& a = *ok[i - 1];
    const auto& b = *ok[i];
    const double lh = std::log(a.h / b.h);
    std::cout << "pairwise n=" << a.n << "->" << b.n << "  l2_u " << std::log(a.l2_u / b.l2_u) / lh
              << "  h1_u " << std::log(a.h1_u / b.h1_u) / lh << "  l2_p "
              << std::log(a.l2_p / b.l2_p) / lh << "  lam_int "
              << std::log(a.lam_int / b.lam_int) / lh << '\n';
  }
  std::cout << std::defaultfloat;

  std::cout << "\nbad elements (theta_min " << m.theta_min << "):";
  for (const auto& r : report.rows) {
    std::cout << "  n=" << r.n << ": " << r.bad_elements;
    if (auto it = kReferenceBadCounts.find(r.n); it != kReferenceBadCounts.end()) {
      std::cout << " (reference " << it->second << ")";
    }
  }
  std::cout << "\n  reference counts 8/8/56 at n=40/80/160; they depend on the diagonal"
               " direction and fraction computation, so differences are expected.\n";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  try {
    rc = parse_config(argc, argv);
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "fdstokes: " << e.what() << '\n';
    return 2;
  }
  set_thread_count(rc.threads);

  try {
    if (!rc.dump_mesh.empty() || !rc.dump_geometry.empty()) {
      const BackgroundMesh mesh(rc.n_list.front());
      if (!rc.dump_mesh.empty()) {
        std::ofstream out(rc.dump_mesh);
        mesh.write_text(out);
      }
      if (!rc.dump_geometry.empty()) {
        CutGeometry cut(mesh, rc.geometry, rc.subsegments);
        cut.set_good_bad(classify_good_bad(cut, rc.method.theta_min));
        std::ofstream out(rc.dump_geometry);
        cut.write_text(out);
      }
    }

    StudyOptions opts;
    opts.level_set = rc.geometry;
    opts.subsegments = rc.subsegments;
    opts.degrees = rc.degrees;
    opts.least_squares_fallback = rc.least_squares_fallback;
    opts.probe_infsup = rc.probe_infsup;

    int status = 0;
    for (std::size_t run = 0; run < rc.runs.size(); ++run) {
      const std::string out_path = run_output_path(rc, run);
      if (rc.emit_matrix) {
        opts.on_system = [&](int n, const BlockSystem& sys) {
          std::ofstream out(matrix_path(out_path, n));
          write_matrix_market(out, sys.matrix);
        };
      }
      if (run > 0) std::cout << "\n----------------------------------------\n\n";
      const ErrorReport report = run_convergence_study(rc.runs[run], rc.n_list, opts);

      std::ofstream csv(out_path);
      if (!csv) {
        std::cerr << "fdstokes: cannot write " << out_path << '\n';
        return 1;
      }
      write_csv(csv, report, rc.probe_infsup);
      print_summary(rc, rc.runs[run], report);

      for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (!report.rows[i].ok) {
          std::cerr << "fdstokes: " << to_string(rc.runs[run].variant) << ' ' << rc.runs[run].fe.label()
                    << " mesh " << i << " (n=" << report.rows[i].n << ") failed: " << report.rows[i].failure
                    << '\n';
          status = 1;
        }
      }
    }
    return status;
  } catch (const std::exception& e) {
    std::cerr << "fdstokes: " << e.what() << '\n';
    return 1;
  }
}
