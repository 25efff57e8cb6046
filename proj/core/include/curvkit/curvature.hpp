#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "curvkit/metric_field.hpp"
#include "curvkit/tensor_ops.hpp"

namespace curvkit {

template <int N> using ScalarField = std::vector<double>;
template <int N> using Sym2Field = std::vector<Sym2<N>>;
template <int N> using Tensor3Field = std::vector<Tensor3<N>>;

/// Metric, inverse, first and second coordinate derivatives, and Christoffel
/// symbols at one grid point. Everything downstream assembles from this.
template <int N> struct MetricJet {
  Sym2<N> g, ginv;
  std::array<Sym2<N>, N> dg;                 // dg[a](i,j)      = d_a g_ij
  std::array<std::array<Sym2<N>, N>, N> ddg; // ddg[a][b](i,j)  = d_a d_b g_ij
  Tensor3<N> gamma;                          // gamma(k,i,j)    = Gamma^k_ij
  bool has_second = false;
};

namespace fd {

template <int N, class Get>
double d1(const Grid<N> &grid, Get &&get, Index p, int axis, const Stencil &st) {
  const double inv_h = 1.0 / grid.axis(axis).h();
  double s = 0.0;
  for (int off = -st.radius; off <= st.radius; ++off) {
    const double w = st.d1[off + 2];
    if (w == 0.0) continue;
    s += w * get(grid.shift(p, axis, off));
  }
  return s * inv_h;
}

template <int N, class Get>
double d2_same(const Grid<N> &grid, Get &&get, Index p, int axis,
               const Stencil &st) {
  const double h = grid.axis(axis).h();
  double s = 0.0;
  for (int off = -st.radius; off <= st.radius; ++off)
    s += st.d2[off + 2] * get(grid.shift(p, axis, off));
  return s / (h * h);
}

} // namespace fd

/// One packed symmetric-matrix component differentiated along an axis.
template <int N>
double d1_sym2_comp(const Grid<N> &grid, const Sym2Field<N> &f, Index p,
                    int axis, int comp, const Stencil &st) {
  return fd::d1(grid, [&](Index q) { return f[q].packed()[comp]; }, p, axis, st);
}

template <int N>
Sym2<N> d1_sym2(const Grid<N> &grid, const Sym2Field<N> &f, Index p, int axis,
                const Stencil &st) {
  Sym2<N> r;
  for (int c = 0; c < Sym2<N>::kPacked; ++c)
    r.packed()[c] = d1_sym2_comp(grid, f, p, axis, c, st);
  return r;
}

template <int N>
MetricJet<N> compute_jet(const MetricField<N> &m, const Sym2Field<N> &gfield,
                         Index p, const Stencil &st, bool with_second) {
  const Grid<N> &grid = m.grid();
  MetricJet<N> jet;
  jet.g = gfield[p];
  jet.ginv = m.ginv(p);

  for (int a = 0; a < N; ++a) jet.dg[a] = d1_sym2(grid, gfield, p, a, st);

  if (with_second) {
    jet.has_second = true;
    for (int a = 0; a < N; ++a)
      for (int c = 0; c < Sym2<N>::kPacked; ++c)
        jet.ddg[a][a].packed()[c] = fd::d2_same(
            grid, [&](Index q) { return gfield[q].packed()[c]; }, p, a, st);
    for (int a = 0; a < N; ++a)
      for (int b = a + 1; b < N; ++b) {
        Sym2<N> cross;
        for (int c = 0; c < Sym2<N>::kPacked; ++c)
          cross.packed()[c] = fd::d1(
              grid,
              [&](Index q) { return d1_sym2_comp(grid, gfield, q, b, c, st); },
              p, a, st);
        jet.ddg[a][b] = cross;
        jet.ddg[b][a] = cross;
      }
  }

  // Gamma^k_ij = (1/2) g^{km} (d_i g_mj + d_j g_mi - d_m g_ij)
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        double s = 0.0;
        for (int mm = 0; mm < N; ++mm)
          s += jet.ginv(k, mm) * (jet.dg[i](mm, j) + jet.dg[j](mm, i) -
                                  jet.dg[mm](i, j));
        jet.gamma.at(k, i, j) = 0.5 * s;
        jet.gamma.at(k, j, i) = 0.5 * s;
      }
  return jet;
}

/// Fully lowered Riemann tensor from a metric jet with second derivatives:
///   R_ijkl = (1/2)(dd_kj g_il + dd_li g_jk - dd_ki g_jl - dd_lj g_ik)
///            + g_pq (Gamma^p_kj Gamma^q_li - Gamma^p_ki Gamma^q_lj).
/// Sign convention: the round sphere has R_ijij > 0 and the Ricci contraction
/// is over the first and third slots.
template <int N> Alg4<N> riemann_raw(const MetricJet<N> &jet) {
  Alg4<N> r;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double v = 0.5 * (jet.ddg[k][j](i, l) + jet.ddg[l][i](j, k) -
                            jet.ddg[k][i](j, l) - jet.ddg[l][j](i, k));
          double gg = 0.0;
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
              gg += jet.g(p, q) * (jet.gamma(p, k, j) * jet.gamma(q, l, i) -
                                   jet.gamma(p, k, i) * jet.gamma(q, l, j));
          r.at(i, j, k, l) = v + gg;
        }
  return r;
}

/// Pointwise curvature package derived from one jet.
template <int N> struct PointCurvature {
  Alg4<N> riem; // projected onto Riemann symmetries
  Sym2<N> ric;
  Sym2<N> ric0;
  double scalar = 0.0;
  Alg4<N> weyl;
  double symmetry_residual = 0.0; // projection distance / max |Riem|
};

template <int N> PointCurvature<N> point_curvature(const MetricJet<N> &jet) {
  PointCurvature<N> pc;
  const Alg4<N> raw = riemann_raw(jet);
  pc.riem = Alg4<N>::project(raw.raw(), kRiemannFlags);
  const double scale = std::max(pc.riem.max_abs(), 1e-30);
  pc.symmetry_residual = pc.riem.projection_residual() / scale;

  for (int j = 0; j < N; ++j)
    for (int l = j; l < N; ++l) {
      double s = 0.0;
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) s += jet.ginv(i, k) * pc.riem(i, j, k, l);
      pc.ric.at(j, l) = s;
    }
  pc.scalar = trace(pc.ric, jet.ginv);

  pc.ric0 = pc.ric;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      pc.ric0.at(i, j) -= (pc.scalar / N) * jet.g(i, j);

  const Alg4<N> kn_rg = kulkarni_nomizu(pc.ric0, jet.g);
  const Alg4<N> kn_gg = kulkarni_nomizu(jet.g, jet.g);
  pc.weyl = pc.riem;
  const double c1 = 1.0 / (N - 2);
  const double c2 = pc.scalar / (2.0 * N * (N - 1));
  for (int k = 0; k < Alg4<N>::kSize; ++k)
    pc.weyl.raw()[k] -= c1 * kn_rg.raw()[k] + c2 * kn_gg.raw()[k];
  pc.weyl.set_flags(kWeylFlags);
  return pc;
}

/// All curvature fields of a metric on a chart. The cheap fields (scalar
/// curvature, traceless Ricci) are stored densely; four-index fields are
/// evaluated per point on demand so large grids stay within memory.
template <int N> class CurvatureBundle {
public:
  CurvatureBundle(std::shared_ptr<const MetricField<N>> m, int stencil_order)
      : m_(std::move(m)), order_(stencil_order), st_(stencil_for(stencil_order)) {
    const Grid<N> &grid = this->grid();
    for (int a = 0; a < N; ++a)
      if (!grid.axis(a).periodic &&
          grid.axis(a).excise_lo < st_.radius)
        throw std::invalid_argument(
            "non-periodic axes need an excised margin >= stencil radius");

    gfield_.resize(grid.size());
    for (Index p = 0; p < grid.size(); ++p) gfield_[p] = m_->g(p);

    const Region<N> first = margin_region(grid, margin_first());
    scalar_.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    ric0_.resize(grid.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto &s : ric0_)
      for (int c = 0; c < Sym2<N>::kPacked; ++c) s.packed()[c] = nan;

    for (Index p = 0; p < grid.size(); ++p) {
      if (!first.contains(grid.unflatten(p))) continue;
      const auto jet = compute_jet(*m_, gfield_, p, st_, true);
      const auto pc = point_curvature(jet);
      scalar_[p] = pc.scalar;
      ric0_[p] = pc.ric0;
      max_sym_residual_ = std::max(max_sym_residual_, pc.symmetry_residual);
    }
  }

  const MetricField<N> &metric() const { return *m_; }
  const Grid<N> &grid() const { return m_->grid(); }
  int stencil_order() const { return order_; }
  const Stencil &stencil() const { return st_; }

  int margin_first() const { return st_.radius; }    // Gamma..Weyl
  int margin_second() const { return 2 * st_.radius; } // Cotton, grad fields
  int margin_third() const { return 3 * st_.radius; }  // Bach

  double max_symmetry_residual() const { return max_sym_residual_; }

  const ScalarField<N> &scalar_field() const { return scalar_; }
  const Sym2Field<N> &tracefree_ricci_field() const { return ric0_; }

  MetricJet<N> jet(Index p, bool with_second = true) const {
    return compute_jet(*m_, gfield_, p, st_, with_second);
  }
  Tensor3<N> christoffel(Index p) const { return jet(p, false).gamma; }
  PointCurvature<N> curvature(Index p) const { return point_curvature(jet(p)); }
  Alg4<N> riemann(Index p) const { return curvature(p).riem; }
  Alg4<N> weyl(Index p) const { return curvature(p).weyl; }
  Sym2<N> ricci(Index p) const { return curvature(p).ric; }
  double scalar(Index p) const { return scalar_[p]; }
  Sym2<N> tracefree_ricci(Index p) const { return ric0_[p]; }

  /// d_a R (gradient 1-form of the scalar curvature field).
  Vec<N> grad_scalar(Index p) const {
    Vec<N> v;
    for (int a = 0; a < N; ++a)
      v[a] = fd::d1(grid(), [&](Index q) { return scalar_[q]; }, p, a, st_);
    return v;
  }

  /// nabla_a R0_jk from the stored traceless-Ricci field.
  Tensor3<N> cov_tracefree_ricci(Index p) const {
    return cov_sym2_at(ric0_, p);
  }

  /// Cotton tensor C_ijk = nabla_i R0_kj - nabla_j R0_ki
  ///                      + (n-2)/(2n(n-1)) (dR_i g_jk - dR_j g_ik).
  Tensor3<N> cotton(Index p) const {
    const Tensor3<N> cov = cov_tracefree_ricci(p);
    const Vec<N> dr = grad_scalar(p);
    const Sym2<N> &g = gfield_[p];
    const double c = double(N - 2) / (2.0 * N * (N - 1));
    Tensor3<N> out;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          out.at(i, j, k) = cov(i, k, j) - cov(j, k, i) +
                            c * (dr[i] * g(j, k) - dr[j] * g(i, k));
    return out;
  }

  /// Bach tensor B_ij = (1/(n-2)) (g^{km} nabla_m C_kij + W_ikjl Ric^{kl}).
  /// Cotton values at stencil neighbors come from a rolling plane cache, so
  /// sweeping Bach over the grid computes each Cotton point once.
  Sym2<N> bach(Index p) const {
    const auto jet0 = jet(p, true);
    const auto pc = point_curvature(jet0);

    const Tensor3<N> cp = cached_cotton(p);
    Sym2<N> div;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        double s = 0.0;
        for (int mm = 0; mm < N; ++mm) {
          // d_m C_kij for all k, then contract with g^{km}
          for (int k = 0; k < N; ++k) {
            const double gkm = jet0.ginv(k, mm);
            if (gkm == 0.0) continue;
            const double d = fd::d1(
                grid(),
                [&, k, i, j](Index q) { return cached_cotton(q)(k, i, j); }, p,
                mm, st_);
            s += gkm * d;
          }
          // Gamma corrections: -Gamma^q_mk C_qij - Gamma^q_mi C_kqj - Gamma^q_mj C_kiq
          for (int k = 0; k < N; ++k) {
            const double gkm = jet0.ginv(k, mm);
            if (gkm == 0.0) continue;
            double corr = 0.0;
            for (int q = 0; q < N; ++q)
              corr += jet0.gamma(q, mm, k) * cp(q, i, j) +
                      jet0.gamma(q, mm, i) * cp(k, q, j) +
                      jet0.gamma(q, mm, j) * cp(k, i, q);
            s -= gkm * corr;
          }
        }
        div.at(i, j) = s;
      }

    // W_ikjl Ric^{kl}
    Sym2<N> ric_up;
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) {
        double s = 0.0;
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l)
            s += jet0.ginv(a, k) * jet0.ginv(b, l) * pc.ric(k, l);
        ric_up.at(a, b) = s;
      }
    Sym2<N> wric;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        double s = 0.0;
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) s += pc.weyl(i, k, j, l) * ric_up(k, l);
        wric.at(i, j) = s;
      }

    Sym2<N> b;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j)
        b.at(i, j) = (div(i, j) + wric(i, j)) / double(N - 2);
    return b;
  }

  /// (div W)_ijk = g^{lm} nabla_m W_ijkl, evaluated by streaming Weyl values.
  Tensor3<N> div_weyl(Index p) const {
    const auto jet0 = jet(p, true);
    const Alg4<N> wp = point_curvature(jet0).weyl;

    // Weyl at the stencil neighbors, one evaluation per offset.
    Tensor3<N> out;
    std::array<std::array<Alg4<N>, 5>, N> wn; // [axis][offset+2]
    for (int a = 0; a < N; ++a)
      for (int off = -st_.radius; off <= st_.radius; ++off) {
        if (off == 0) continue;
        const Index q = grid().shift(p, a, off);
        wn[a][off + 2] = point_curvature(jet(q, true)).weyl;
      }

    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          double s = 0.0;
          for (int mm = 0; mm < N; ++mm) {
            const double inv_h = 1.0 / grid().axis(mm).h();
            for (int l = 0; l < N; ++l) {
              const double glm = jet0.ginv(l, mm);
              if (glm == 0.0) continue;
              double d = 0.0;
              for (int off = -st_.radius; off <= st_.radius; ++off) {
                if (off == 0) continue;
                d += st_.d1[off + 2] * wn[mm][off + 2](i, j, k, l);
              }
              d *= inv_h;
              // Gamma corrections for the four lower slots
              double corr = 0.0;
              for (int q = 0; q < N; ++q)
                corr += jet0.gamma(q, mm, i) * wp(q, j, k, l) +
                        jet0.gamma(q, mm, j) * wp(i, q, k, l) +
                        jet0.gamma(q, mm, k) * wp(i, j, q, l) +
                        jet0.gamma(q, mm, l) * wp(i, j, k, q);
              s += glm * (d - corr);
            }
          }
          out.at(i, j, k) = s;
        }
    return out;
  }

  /// Covariant derivative of an arbitrary stored Sym2 field at p.
  Tensor3<N> cov_sym2_at(const Sym2Field<N> &phi, Index p) const {
    const auto jet0 = jet(p, false);
    Tensor3<N> out;
    for (int a = 0; a < N; ++a) {
      const Sym2<N> dphi = d1_sym2(grid(), phi, p, a, st_);
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          double s = dphi(j, k);
          for (int l = 0; l < N; ++l)
            s -= jet0.gamma(l, a, j) * phi[p](l, k) +
                 jet0.gamma(l, a, k) * phi[p](j, l);
          out.at(a, j, k) = s;
        }
    }
    return out;
  }

  /// Laplacian of a stored scalar field: g^{ab}(d_a d_b f - Gamma^m_ab d_m f).
  double laplacian_scalar(const ScalarField<N> &f, Index p) const {
    const auto jet0 = jet(p, false);
    Vec<N> df;
    for (int a = 0; a < N; ++a)
      df[a] = fd::d1(grid(), [&](Index q) { return f[q]; }, p, a, st_);
    double s = 0.0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        const double gab = jet0.ginv(a, b);
        if (gab == 0.0) continue;
        double dd;
        if (a == b) {
          dd = fd::d2_same(grid(), [&](Index q) { return f[q]; }, p, a, st_);
        } else {
          dd = fd::d1(
              grid(),
              [&, b](Index q) {
                return fd::d1(grid(), [&](Index r) { return f[r]; }, q, b, st_);
              },
              p, a, st_);
        }
        double corr = 0.0;
        for (int mm = 0; mm < N; ++mm) corr += jet0.gamma(mm, a, b) * df[mm];
        s += gab * (dd - corr);
      }
    return s;
  }

  /// Gradient 1-form of a stored scalar field.
  Vec<N> grad_of(const ScalarField<N> &f, Index p) const {
    Vec<N> v;
    for (int a = 0; a < N; ++a)
      v[a] = fd::d1(grid(), [&](Index q) { return f[q]; }, p, a, st_);
    return v;
  }

  /// |grad f|^2 = g^{ab} d_a f d_b f for a stored scalar field.
  double grad_norm2_of(const ScalarField<N> &f, Index p) const {
    const Vec<N> df = grad_of(f, p);
    const Sym2<N> gi = m_->ginv(p);
    double s = 0.0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) s += gi(a, b) * df[a] * df[b];
    return s;
  }

private:
  const Tensor3<N> &cached_cotton(Index p) const {
    const auto m = grid().unflatten(p);
    const int plane = m[0];
    auto it = cotton_planes_.find(plane);
    if (it == cotton_planes_.end()) {
      it = cotton_planes_.emplace(plane, compute_cotton_plane(plane)).first;
      touch_.push_back(plane);
      if (cotton_planes_.size() > 8) {
        const int victim = touch_.front();
        touch_.erase(touch_.begin());
        if (victim != plane) cotton_planes_.erase(victim);
      }
    }
    const Index plane_stride = grid().size() / grid().axis(0).count;
    return it->second[p % plane_stride];
  }

  std::vector<Tensor3<N>> compute_cotton_plane(int plane) const {
    const Grid<N> &grid = this->grid();
    const Index plane_stride = grid.size() / grid.axis(0).count;
    std::vector<Tensor3<N>> out(plane_stride);
    const Index base = static_cast<Index>(plane) * plane_stride;
    for (Index r = 0; r < plane_stride; ++r) {
      const Index p = base + r;
      const auto m = grid.unflatten(p);
      bool ok = true;
      for (int a = 0; a < N; ++a) {
        if (grid.axis(a).periodic) continue;
        if (m[a] < margin_second() ||
            m[a] >= grid.axis(a).count - margin_second())
          ok = false;
      }
      if (ok) out[r] = cotton(p);
    }
    return out;
  }

  std::shared_ptr<const MetricField<N>> m_;
  int order_;
  Stencil st_;
  Sym2Field<N> gfield_;
  ScalarField<N> scalar_;
  Sym2Field<N> ric0_;
  double max_sym_residual_ = 0.0;

  mutable std::map<int, std::vector<Tensor3<N>>> cotton_planes_;
  mutable std::vector<int> touch_;
};

/// Spec'd free operation: the full Christoffel field.
template <int N>
Tensor3Field<N> christoffel(const MetricField<N> &m, int stencil_order = 4) {
  const Stencil &st = stencil_for(stencil_order);
  const Grid<N> &grid = m.grid();
  Sym2Field<N> gfield(grid.size());
  for (Index p = 0; p < grid.size(); ++p) gfield[p] = m.g(p);
  Tensor3Field<N> out(grid.size());
  const Region<N> first = margin_region(grid, st.radius);
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    out[p] = compute_jet(m, gfield, p, st, false).gamma;
  }
  return out;
}

/// Covariant derivative of a Sym2 field: out[p](a,j,k) = nabla_a phi_jk.
template <int N>
Tensor3Field<N> covariant_derivative_sym2(const CurvatureBundle<N> &bundle,
                                          const Sym2Field<N> &phi) {
  const Grid<N> &grid = bundle.grid();
  Tensor3Field<N> out(grid.size());
  const Region<N> first = margin_region(grid, bundle.margin_first());
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    out[p] = bundle.cov_sym2_at(phi, p);
  }
  return out;
}

/// theta-tensor field C(i,j,k) = nabla_i phi_kj - theta nabla_j phi_ki.
template <int N> struct ThetaTensorField {
  double theta = 0.0;
  Tensor3Field<N> c;
};

template <int N>
ThetaTensorField<N> theta_tensor(const CurvatureBundle<N> &bundle,
                                 const Sym2Field<N> &phi, double theta) {
  const Grid<N> &grid = bundle.grid();
  ThetaTensorField<N> out;
  out.theta = theta;
  out.c.resize(grid.size());
  const Region<N> first = margin_region(grid, bundle.margin_first());
  for (Index p = 0; p < grid.size(); ++p) {
    if (!first.contains(grid.unflatten(p))) continue;
    const Tensor3<N> cov = bundle.cov_sym2_at(phi, p);
    Tensor3<N> c;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          c.at(i, j, k) = cov(i, k, j) - theta * cov(j, k, i);
    out.c[p] = c;
  }
  return out;
}

} // namespace curvkit
