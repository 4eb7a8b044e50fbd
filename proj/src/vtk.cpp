#include <ostream>

#include "vmproj/csv.hpp"
#include "vmproj/fem2d.hpp"

namespace vmproj {

namespace {

void writeTensors(std::ostream& out, const char* name, const StressField& s) {
  out << "TENSORS " << name << " double\n";
  for (int e = 0; e < s.size(); ++e) {
    const auto c = s.raw().col(e);
    out << formatNumber(c(0)) << ' ' << formatNumber(c(1)) << " 0\n"
        << formatNumber(c(1)) << ' ' << formatNumber(c(2)) << " 0\n"
        << "0 0 0\n\n";
  }
}

}  // namespace

void writeVtk(std::ostream& out, const Mesh2D& mesh, const Vector& velocity, const StressField& sigma,
              const StressField* trialStress, const std::string& title) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.nodeCount() << " double\n";
  for (int n = 0; n < mesh.nodeCount(); ++n)
    out << formatNumber(mesh.nodes()(0, n)) << ' ' << formatNumber(mesh.nodes()(1, n)) << " 0\n";

  out << "CELLS " << mesh.triangleCount() << ' ' << 4 * mesh.triangleCount() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangleCount() << '\n';
  for (int e = 0; e < mesh.triangleCount(); ++e) out << "5\n";

  out << "CELL_DATA " << mesh.triangleCount() << '\n';
  writeTensors(out, "sigma", sigma);
  if (trialStress != nullptr) writeTensors(out, "sigma_trial", *trialStress);

  out << "POINT_DATA " << mesh.nodeCount() << '\n';
  out << "VECTORS velocity double\n";
  for (int n = 0; n < mesh.nodeCount(); ++n)
    out << formatNumber(velocity(2 * n)) << ' ' << formatNumber(velocity(2 * n + 1)) << " 0\n";
}

}  // namespace vmproj
