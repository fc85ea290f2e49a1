#ifndef CURVHOM_COORDS_HPP
#define CURVHOM_COORDS_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace curvhom {

// Coordinate layout on R^{6+4p}.  Flat order is
//   x, y, z_1..z_p, yt, zt_1..zt_p, xs, ys, zs_1..zs_p, yts, zts_1..ztp
// where the "t" suffix marks the tilde block and the "s" suffix the dual
// (starred) block.  The dual of slot i is i +- (3+2p); the metric pairs each
// plain coordinate with its dual.

enum class CoordKind { X, Y, Z, YTilde, ZTilde, XStar, YStar, ZStar, YTildeStar, ZTildeStar };

struct Coordinates {
    int p;

    explicit Coordinates(int p_) : p(p_) {
        if (p < 1) throw std::invalid_argument("p must be >= 1");
    }

    int dim() const { return 6 + 4 * p; }
    int half() const { return 3 + 2 * p; }

    int x() const { return 0; }
    int y() const { return 1; }
    int z(int i) const { check_index(i); return 1 + i; }
    int ytilde() const { return p + 2; }
    int ztilde(int i) const { check_index(i); return p + 2 + i; }

    int xstar() const { return half(); }
    int ystar() const { return half() + 1; }
    int zstar(int i) const { return z(i) + half(); }
    int ytildestar() const { return ytilde() + half(); }
    int ztildestar(int i) const { return ztilde(i) + half(); }

    bool is_starred(int c) const { return c >= half(); }
    int dual(int c) const { return (c + half()) % dim(); }

    CoordKind kind(int c) const {
        int b = c % half();
        bool star = is_starred(c);
        if (b == 0) return star ? CoordKind::XStar : CoordKind::X;
        if (b == 1) return star ? CoordKind::YStar : CoordKind::Y;
        if (b <= p + 1) return star ? CoordKind::ZStar : CoordKind::Z;
        if (b == p + 2) return star ? CoordKind::YTildeStar : CoordKind::YTilde;
        return star ? CoordKind::ZTildeStar : CoordKind::ZTilde;
    }

    // 1-based z index for Z/ZTilde kinds, 0 otherwise.
    int sub_index(int c) const {
        int b = c % half();
        if (b >= 2 && b <= p + 1) return b - 1;
        if (b >= p + 3) return b - p - 2;
        return 0;
    }

    std::string name(int c) const {
        int b = c % half();
        std::string base;
        if (b == 0) base = "x";
        else if (b == 1) base = "y";
        else if (b <= p + 1) base = "z" + std::to_string(b - 1);
        else if (b == p + 2) base = "yt";
        else base = "zt" + std::to_string(b - p - 2);
        if (is_starred(c)) {
            // star marker goes before any numeric index: x->xs, z1->zs1
            if (base == "x" || base == "y") return base + "s";
            if (base == "yt") return "yts";
            if (base[0] == 'z' && base[1] != 't') return "zs" + base.substr(1);
            return "zts" + base.substr(2);
        }
        return base;
    }

    std::optional<int> parse_name(const std::string& s) const {
        for (int c = 0; c < dim(); ++c)
            if (name(c) == s) return c;
        return std::nullopt;
    }

private:
    void check_index(int i) const {
        if (i < 1 || i > p) throw std::out_of_range("coordinate index out of [1,p]");
    }
};

} // namespace curvhom

#endif
