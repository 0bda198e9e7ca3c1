#include "qi/conic.hpp"

#include <sstream>

namespace qi::conic {

int Program::add_psd_block(int dim) {
  if (dim < 1) throw InputError("conic: psd block dimension must be >= 1");
  psd_dims_.push_back(dim);
  c_psd_.emplace_back(CMat::Zero(dim, dim));
  return static_cast<int>(psd_dims_.size()) - 1;
}

int Program::add_vec_block(int dim) {
  if (dim < 1) throw InputError("conic: vec block dimension must be >= 1");
  vec_dims_.push_back(dim);
  c_vec_.emplace_back(RVec::Zero(dim));
  return static_cast<int>(vec_dims_.size()) - 1;
}

void Program::add_psd_objective(int block, const CMat& c) {
  auto& dst = c_psd_.at(static_cast<size_t>(block));
  if (c.rows() != dst.rows() || c.cols() != dst.cols()) {
    throw InputError("conic: objective shape mismatch");
  }
  dst += hermitize(c);
}

void Program::add_vec_objective(int block, const RVec& c) {
  auto& dst = c_vec_.at(static_cast<size_t>(block));
  if (c.size() != dst.size()) throw InputError("conic: objective shape mismatch");
  dst += c;
}

int Program::add_constraint(Constraint con) {
  for (auto& t : con.psd) {
    const int d = psd_dims_.at(static_cast<size_t>(t.block));
    if (t.coeff.rows() != d || t.coeff.cols() != d) {
      throw InputError("conic: constraint coefficient shape mismatch");
    }
    t.coeff = hermitize(t.coeff);
  }
  for (const auto& t : con.vec) {
    if (t.coeff.size() != vec_dims_.at(static_cast<size_t>(t.block))) {
      throw InputError("conic: constraint coefficient shape mismatch");
    }
  }
  constraints_.push_back(std::move(con));
  return static_cast<int>(constraints_.size()) - 1;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

Program dualize(const Program& p) {
  Program d;
  // Free row multipliers split as y = y_plus - y_minus.
  const int m = p.rows();
  int yp = -1, ym = -1;
  if (m > 0) {
    yp = d.add_vec_block(m);
    ym = d.add_vec_block(m);
    RVec b(m);
    for (int i = 0; i < m; ++i) b[i] = p.constraint(i).rhs;
    d.add_vec_objective(yp, (-b).eval());
    d.add_vec_objective(ym, b);
  }
  std::vector<int> slack_psd, slack_vec;
  for (int b = 0; b < p.psd_count(); ++b) slack_psd.push_back(d.add_psd_block(p.psd_dim(b)));
  for (int b = 0; b < p.vec_count(); ++b) slack_vec.push_back(d.add_vec_block(p.vec_dim(b)));

  // Feasibility of the dual slack: S_b + sum_i y_i A_ib = C_b, expanded in an
  // orthonormal Hermitian basis coordinate by coordinate.
  for (int b = 0; b < p.psd_count(); ++b) {
    const auto basis = hermitian_basis(p.psd_dim(b));
    for (const auto& e : basis) {
      Program::Constraint con;
      con.psd.push_back({slack_psd[static_cast<size_t>(b)], e});
      RVec coeff = RVec::Zero(m);
      for (int i = 0; i < m; ++i) {
        for (const auto& t : p.constraint(i).psd) {
          if (t.block == b) coeff[i] += (e.adjoint() * t.coeff).trace().real();
        }
      }
      if (m > 0 && coeff.cwiseAbs().maxCoeff() > 0) {
        con.vec.push_back({yp, coeff});
        con.vec.push_back({ym, (-coeff).eval()});
      }
      con.rhs = (e.adjoint() * p.psd_objective(b)).trace().real();
      d.add_constraint(std::move(con));
    }
  }
  for (int b = 0; b < p.vec_count(); ++b) {
    for (int k = 0; k < p.vec_dim(b); ++k) {
      Program::Constraint con;
      RVec unit = RVec::Zero(p.vec_dim(b));
      unit[k] = 1.0;
      con.vec.push_back({slack_vec[static_cast<size_t>(b)], unit});
      RVec coeff = RVec::Zero(m);
      for (int i = 0; i < m; ++i) {
        for (const auto& t : p.constraint(i).vec) {
          if (t.block == b) coeff[i] += t.coeff[k];
        }
      }
      if (m > 0 && coeff.cwiseAbs().maxCoeff() > 0) {
        con.vec.push_back({yp, coeff});
        con.vec.push_back({ym, (-coeff).eval()});
      }
      con.rhs = p.vec_objective(b)[k];
      d.add_constraint(std::move(con));
    }
  }
  return d;
}

std::string dump_program(const Program& p) {
  std::ostringstream os;
  os << "conic program: " << p.rows() << " rows, " << p.psd_count()
     << " psd blocks, " << p.vec_count() << " vec blocks\n";
  for (int b = 0; b < p.psd_count(); ++b) {
    os << "psd " << b << " dim " << p.psd_dim(b) << "\n";
    const CMat& c = p.psd_objective(b);
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j)
        if (std::abs(c(i, j)) > 0)
          os << "  c[" << i << "," << j << "] = " << c(i, j).real() << "+"
             << c(i, j).imag() << "i\n";
  }
  for (int b = 0; b < p.vec_count(); ++b) {
    os << "vec " << b << " dim " << p.vec_dim(b) << "\n";
    const RVec& c = p.vec_objective(b);
    for (int k = 0; k < c.size(); ++k)
      if (c[k] != 0) os << "  c[" << k << "] = " << c[k] << "\n";
  }
  for (int i = 0; i < p.rows(); ++i) {
    const auto& con = p.constraint(i);
    os << "row " << i << " rhs " << con.rhs << "\n";
    for (const auto& t : con.psd) {
      for (int r = 0; r < t.coeff.rows(); ++r)
        for (int c = 0; c < t.coeff.cols(); ++c)
          if (std::abs(t.coeff(r, c)) > 0)
            os << "  psd " << t.block << " [" << r << "," << c << "] = "
               << t.coeff(r, c).real() << "+" << t.coeff(r, c).imag() << "i\n";
    }
    for (const auto& t : con.vec) {
      for (int k = 0; k < t.coeff.size(); ++k)
        if (t.coeff[k] != 0)
          os << "  vec " << t.block << " [" << k << "] = " << t.coeff[k] << "\n";
    }
  }
  return os.str();
}

}  // namespace qi::conic
