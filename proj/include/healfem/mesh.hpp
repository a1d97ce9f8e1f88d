#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "healfem/geometry.hpp"

namespace healfem {

/// Values and physical-space gradients of the six P2 shape functions at one
/// reference point.
struct BasisEval {
    std::array<double, 6> value{};
    std::array<Vec2, 6> grad{};
};

struct Barycentric {
    double l0, l1, l2;
};

/// Uniform P2 triangulation of an axis-aligned rectangle.
///
/// Every grid square is split along the lower-left-to-upper-right diagonal,
/// so all elements are congruent right triangles and the shape-regularity
/// constants are mesh-independent. Nodes live on the (2n+1)x(2n+1) lattice
/// (vertices plus edge midpoints) and are numbered lexicographically, row by
/// row with x fastest. The mesh is immutable after construction.
class Mesh {
public:
    Mesh(int n_cells_per_side, const Rect& domain)
        : n_(n_cells_per_side), domain_(domain) {
        if (n_cells_per_side < 1)
            throw std::invalid_argument("build_mesh: n_cells_per_side must be >= 1");
        if (domain.width() <= 0.0 || domain.height() <= 0.0)
            throw std::invalid_argument("build_mesh: domain must have positive area");

        hx_ = domain.width() / n_;
        hy_ = domain.height() / n_;
        h_ = std::max(hx_, hy_);
        stride_ = 2 * n_ + 1;

        nodes_.reserve(static_cast<std::size_t>(stride_) * stride_);
        for (int j = 0; j < stride_; ++j)
            for (int i = 0; i < stride_; ++i)
                nodes_.push_back({domain.lo.x + 0.5 * hx_ * i, domain.lo.y + 0.5 * hy_ * j});

        elements_.reserve(static_cast<std::size_t>(2) * n_ * n_);
        for (int cy = 0; cy < n_; ++cy) {
            for (int cx = 0; cx < n_; ++cx) {
                // lattice coordinates of the cell corners
                const int ax = 2 * cx, ay = 2 * cy;
                const auto id = [this](int i, int j) { return j * stride_ + i; };
                // lower triangle: (a, b, c), upper: (a, c, d) with the shared
                // diagonal a-c
                push_element(id(ax, ay), id(ax + 2, ay), id(ax + 2, ay + 2));
                push_element(id(ax, ay), id(ax + 2, ay + 2), id(ax, ay + 2));
            }
        }

        eta1_ = 1.0; // h_K = sqrt(hx^2 + hy^2) >= max(hx, hy) = h on every element
        eta2_ = measure_eta2();
    }

    int cells_per_side() const { return n_; }
    const Rect& domain() const { return domain_; }
    double h() const { return h_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double eta1() const { return eta1_; }
    double eta2() const { return eta2_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t element_count() const { return elements_.size(); }
    const Vec2& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const std::array<std::int32_t, 6>& element(std::size_t e) const {
        if (e >= elements_.size())
            throw std::out_of_range("Mesh: element id out of range");
        return elements_[e];
    }

    /// Triangle area (identical for all elements of this mesh).
    double element_area() const { return 0.5 * hx_ * hy_; }

    /// Longest element side.
    double element_h_k() const { return std::sqrt(hx_ * hx_ + hy_ * hy_); }

    /// Inscribed-circle diameter of an element.
    double element_rho_k() const {
        const double a = hx_, b = hy_, c = element_h_k();
        return 2.0 * element_area() / (0.5 * (a + b + c));
    }

    /// P2 shape functions and physical gradients at a barycentric point of
    /// the given element.
    BasisEval eval_basis(std::size_t e, const Barycentric& bc) const {
        const auto& el = element(e);
        BasisEval out;
        const double l0 = bc.l0, l1 = bc.l1, l2 = bc.l2;
        out.value = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
                     4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
        // reference gradients wrt (xi, eta) = (l1, l2)
        const std::array<Vec2, 6> ref = {Vec2{1 - 4 * l0, 1 - 4 * l0},
                                         Vec2{4 * l1 - 1, 0.0},
                                         Vec2{0.0, 4 * l2 - 1},
                                         Vec2{4 * (l0 - l1), -4 * l1},
                                         Vec2{4 * l2, 4 * l1},
                                         Vec2{-4 * l2, 4 * (l0 - l2)}};
        // affine map: x = V0 + J (xi, eta), grad_x = J^{-T} grad_ref
        const Vec2 v0 = nodes_[el[0]], v1 = nodes_[el[1]], v2 = nodes_[el[2]];
        const double j00 = v1.x - v0.x, j01 = v2.x - v0.x;
        const double j10 = v1.y - v0.y, j11 = v2.y - v0.y;
        const double det = j00 * j11 - j01 * j10;
        const double i00 = j11 / det, i01 = -j10 / det;
        const double i10 = -j01 / det, i11 = j00 / det;
        for (int k = 0; k < 6; ++k)
            out.grad[k] = {i00 * ref[k].x + i01 * ref[k].y,
                          i10 * ref[k].x + i11 * ref[k].y};
        return out;
    }

    /// Physical coordinates of a barycentric point of an element.
    Vec2 map_point(std::size_t e, const Barycentric& bc) const {
        const auto& el = element(e);
        const Vec2 v0 = nodes_[el[0]], v1 = nodes_[el[1]], v2 = nodes_[el[2]];
        return {bc.l0 * v0.x + bc.l1 * v1.x + bc.l2 * v2.x,
                bc.l0 * v0.y + bc.l1 * v1.y + bc.l2 * v2.y};
    }

    /// Locate the element containing a physical point. Returns false when the
    /// point lies outside the domain.
    bool find_element(const Vec2& p, std::size_t& elem, Barycentric& bc) const {
        const double fx = (p.x - domain_.lo.x) / hx_;
        const double fy = (p.y - domain_.lo.y) / hy_;
        constexpr double slack = 1e-12;
        if (fx < -slack || fy < -slack || fx > n_ + slack || fy > n_ + slack)
            return false;
        int cx = std::min(static_cast<int>(std::floor(fx)), n_ - 1);
        int cy = std::min(static_cast<int>(std::floor(fy)), n_ - 1);
        cx = std::max(cx, 0);
        cy = std::max(cy, 0);
        const double sx = fx - cx, sy = fy - cy;
        if (sy <= sx) { // lower triangle (a, b, c)
            elem = 2 * (static_cast<std::size_t>(cy) * n_ + cx);
            bc = {1.0 - sx, sx - sy, sy};
        } else { // upper triangle (a, c, d)
            elem = 2 * (static_cast<std::size_t>(cy) * n_ + cx) + 1;
            bc = {1.0 - sy, sx, sy - sx};
        }
        return true;
    }

    /// Plain-text dump: one node per line "id x y", then one element per line
    /// "id n0..n5".
    void dump(std::ostream& os) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            os << i << ' ' << nodes_[i].x << ' ' << nodes_[i].y << '\n';
        for (std::size_t e = 0; e < elements_.size(); ++e) {
            os << e;
            for (int k = 0; k < 6; ++k) os << ' ' << elements_[e][k];
            os << '\n';
        }
    }

private:
    void push_element(int a, int b, int c) {
        auto mid = [this](int u, int v) {
            const int ui = u % stride_, uj = u / stride_;
            const int vi = v % stride_, vj = v / stride_;
            return ((uj + vj) / 2) * stride_ + (ui + vi) / 2;
        };
        elements_.push_back({a, b, c, mid(a, b), mid(b, c), mid(c, a)});
    }

    double measure_eta2() const { return element_rho_k() / element_h_k(); }

    int n_;
    Rect domain_;
    double hx_, hy_, h_;
    int stride_;
    double eta1_, eta2_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<std::int32_t, 6>> elements_;
};

inline Mesh build_mesh(int n_cells_per_side, const Rect& domain) {
    return Mesh(n_cells_per_side, domain);
}

} // namespace healfem
