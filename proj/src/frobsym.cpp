#include "drinfeld/frobsym.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace drinfeld {

namespace {

struct UDef {
    std::string name;
    long long coef;            // +-1
    FrobSym::Monomial mono;    // eta = coef * mono
};

std::vector<UDef>& u_registry() {
    static std::vector<UDef> reg;
    return reg;
}
std::mutex& u_mutex() {
    static std::mutex m;
    return m;
}

bool mono_less(const FrobSym::Monomial& a, const FrobSym::Monomial& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        if (!(a[i].g == b[i].g)) return a[i].g < b[i].g;
        if (a[i].e != b[i].e) return a[i].e > b[i].e;  // higher power first
    }
    return a.size() > b.size();  // longer (more factors) first, constants last
}

FrobSym::Monomial mono_mul(const FrobSym::Monomial& a, const FrobSym::Monomial& b) {
    FrobSym::Monomial out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].g == b[j].g) {
            int e = a[i].e + b[j].e;
            if (e != 0) out.push_back({a[i].g, e});
            ++i; ++j;
        } else if (a[i].g < b[j].g) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

FrobSym::Monomial mono_pow(const FrobSym::Monomial& a, int k) {
    FrobSym::Monomial out;
    for (const auto& f : a) {
        int e = f.e * k;
        if (e != 0) out.push_back({f.g, e});
    }
    if (k < 0) std::sort(out.begin(), out.end(), [](const FrobSym::Factor& x, const FrobSym::Factor& y) { return x.g < y.g; });
    return out;
}

} // namespace

void FrobSym::normalize() {
    std::sort(t_.begin(), t_.end(),
              [](const Term& a, const Term& b) { return mono_less(a.m, b.m); });
    std::vector<Term> out;
    out.reserve(t_.size());
    for (size_t i = 0; i < t_.size();) {
        Monomial m = t_[i].m;
        long long c = t_[i].c;
        size_t j = i + 1;
        while (j < t_.size() && t_[j].m == m) { c += t_[j].c; ++j; }
        if (c != 0) out.push_back({std::move(m), c});
        i = j;
    }
    t_.swap(out);
}

FrobSym FrobSym::constant(long long c) {
    FrobSym r;
    if (c != 0) r.t_.push_back({{}, c});
    return r;
}

FrobSym FrobSym::theta(int32_t j) {
    FrobSym r;
    r.t_.push_back({{{{0, 0, j}, 1}}, 1});
    return r;
}

FrobSym FrobSym::kappa(int which, int32_t j) {
    FrobSym r;
    r.t_.push_back({{{{1, (int16_t)which, j}, 1}}, 1});
    return r;
}

FrobSym FrobSym::beta(int which, int32_t j) {
    FrobSym r;
    r.t_.push_back({{{{3, (int16_t)which, j}, 1}}, 1});
    return r;
}

FrobSym FrobSym::normalizer(const std::string& name, const FrobSym& eta) {
    if (eta.t_.size() != 1 || (eta.t_[0].c != 1 && eta.t_[0].c != -1))
        throw DomainError("normalizer: eta must be a +-monomial unit");
    std::lock_guard<std::mutex> lk(u_mutex());
    auto& reg = u_registry();
    int16_t id = -1;
    for (size_t i = 0; i < reg.size(); ++i) {
        if (reg[i].name == name) {
            if (reg[i].coef != eta.t_[0].c || !(reg[i].mono == eta.t_[0].m))
                throw DomainError("normalizer '" + name + "' re-registered with different eta");
            id = (int16_t)i;
            break;
        }
    }
    if (id < 0) {
        reg.push_back({name, eta.t_[0].c, eta.t_[0].m});
        id = (int16_t)(reg.size() - 1);
    }
    FrobSym r;
    r.t_.push_back({{{{2, id, 0}, 1}}, 1});
    return r;
}

bool FrobSym::is_one() const {
    return t_.size() == 1 && t_[0].m.empty() && t_[0].c == 1;
}

FrobSym operator+(const FrobSym& a, const FrobSym& b) {
    FrobSym r;
    r.t_.reserve(a.t_.size() + b.t_.size());
    r.t_.insert(r.t_.end(), a.t_.begin(), a.t_.end());
    r.t_.insert(r.t_.end(), b.t_.begin(), b.t_.end());
    r.normalize();
    return r;
}

FrobSym operator-(const FrobSym& a, const FrobSym& b) { return a + (-b); }

FrobSym FrobSym::operator-() const {
    FrobSym r = *this;
    for (auto& t : r.t_) t.c = -t.c;
    return r;
}

FrobSym operator*(const FrobSym& a, const FrobSym& b) {
    FrobSym r;
    r.t_.reserve(a.t_.size() * b.t_.size());
    for (const auto& ta : a.t_)
        for (const auto& tb : b.t_)
            r.t_.push_back({mono_mul(ta.m, tb.m), ta.c * tb.c});
    r.normalize();
    return r;
}

bool operator==(const FrobSym& a, const FrobSym& b) {
    if (a.t_.size() != b.t_.size()) return false;
    for (size_t i = 0; i < a.t_.size(); ++i)
        if (a.t_[i].c != b.t_[i].c || !(a.t_[i].m == b.t_[i].m)) return false;
    return true;
}

FrobSym FrobSym::inv() const {
    if (t_.size() != 1 || (t_[0].c != 1 && t_[0].c != -1))
        throw DomainError("FrobSym::inv: only +-monomial units are invertible");
    FrobSym r;
    r.t_.push_back({mono_pow(t_[0].m, -1), t_[0].c});
    return r;
}

FrobSym FrobSym::pow(long long k) const {
    if (k < 0) return inv().pow(-k);
    FrobSym r = one(), base = *this;
    while (k) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

FrobSym FrobSym::twist_step(int dir) const {
    std::lock_guard<std::mutex> lk(u_mutex());
    const auto& reg = u_registry();
    FrobSym out;
    for (const auto& t : t_) {
        Term nt;
        nt.c = t.c;
        Monomial extra;  // accumulated eta factors from normalizer rewrites
        long long extra_c = 1;
        for (const auto& f : t.m) {
            if (f.g.kind != 2) {
                nt.m.push_back({{f.g.kind, f.g.which, f.g.idx + dir}, f.e});
            } else {
                const UDef& u = reg[f.g.which];
                nt.m.push_back(f);  // the normalizer itself survives
                // u^(-1) = eta u ; u^(1) = (eta^(1))^{-1} u
                Monomial em = u.mono;
                long long ec = u.coef;
                if (dir > 0) {
                    for (auto& ef : em) ef.g.idx += 1;  // eta^(1)
                    em = mono_pow(em, -1);
                    // coefficient +-1 is its own inverse over Z
                }
                em = mono_pow(em, f.e);
                long long cpow = 1;
                for (int i = 0; i < std::abs(f.e); ++i) cpow *= ec;
                extra = mono_mul(extra, em);
                extra_c *= cpow;
            }
        }
        std::sort(nt.m.begin(), nt.m.end(),
                  [](const Factor& x, const Factor& y) { return x.g < y.g; });
        nt.m = mono_mul(nt.m, extra);
        nt.c *= extra_c;
        out.t_.push_back(std::move(nt));
    }
    out.normalize();
    return out;
}

FrobSym FrobSym::twist(long long n) const {
    FrobSym r = *this;
    int dir = n >= 0 ? 1 : -1;
    for (long long i = 0, m = n >= 0 ? n : -n; i < m; ++i) r = r.twist_step(dir);
    return r;
}

namespace {
std::string gen_str(const FrobSym::Gen& g) {
    std::string s;
    if (g.kind == 0) s = "theta";
    else if (g.kind == 1) s = "kappa_" + std::to_string(g.which);
    else if (g.kind == 3) s = "beta_" + std::to_string(g.which);
    else {
        std::lock_guard<std::mutex> lk(u_mutex());
        s = u_registry()[g.which].name;
    }
    if (g.kind != 2 && g.idx != 0) s += "^(" + std::to_string(g.idx) + ")";
    return s;
}
} // namespace

std::string FrobSym::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : t_) {
        long long c = t.c;
        if (first) {
            if (c < 0) { os << "-"; c = -c; }
        } else {
            os << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        first = false;
        bool wrote = false;
        if (c != 1 || t.m.empty()) {
            os << c;
            wrote = true;
        }
        for (const auto& f : t.m) {
            if (wrote) os << "*";
            os << gen_str(f.g);
            if (f.e != 1) os << "^" << f.e;
            wrote = true;
        }
    }
    return os.str();
}

namespace {
void pskip(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
}
long long pint(const std::string& s, size_t& i) {
    pskip(s, i);
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) { neg = s[i] == '-'; ++i; }
    if (i >= s.size() || !std::isdigit((unsigned char)s[i]))
        throw DomainError("FrobSym::parse: expected integer");
    long long v = 0;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) v = v * 10 + (s[i++] - '0');
    return neg ? -v : v;
}
std::string pname(const std::string& s, size_t& i) {
    pskip(s, i);
    size_t j = i;
    while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
    std::string out = s.substr(i, j - i);
    i = j;
    return out;
}
} // namespace

FrobSym FrobSym::parse(const std::string& text) {
    FrobSym result;
    size_t i = 0;
    pskip(text, i);
    bool first = true;
    while (i < text.size()) {
        int sign = 1;
        pskip(text, i);
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
        } else if (!first) {
            throw DomainError("FrobSym::parse: expected + or - between terms");
        }
        first = false;
        pskip(text, i);
        long long coef = 1;
        FrobSym term = constant(1);
        bool any_factor = false;
        if (i < text.size() && std::isdigit((unsigned char)text[i])) {
            coef = pint(text, i);
            any_factor = true;
            pskip(text, i);
            if (i < text.size() && text[i] == '*') ++i;
        }
        while (i < text.size()) {
            pskip(text, i);
            if (i >= text.size() || !(std::isalpha((unsigned char)text[i]))) break;
            std::string nm = pname(text, i);
            int32_t idx = 0;
            int e = 1;
            if (i + 1 < text.size() && text[i] == '^' && text[i + 1] == '(') {
                i += 2;
                idx = (int32_t)pint(text, i);
                pskip(text, i);
                if (i >= text.size() || text[i] != ')')
                    throw DomainError("FrobSym::parse: expected ')'");
                ++i;
            }
            if (i < text.size() && text[i] == '^') {
                ++i;
                e = (int)pint(text, i);
            }
            FrobSym g;
            if (nm == "theta") g = theta(idx);
            else if (nm.rfind("kappa_", 0) == 0) g = kappa(std::stoi(nm.substr(6)), idx);
            else if (nm.rfind("beta_", 0) == 0) g = beta(std::stoi(nm.substr(5)), idx);
            else {
                // normalizer by registry name; must be registered already
                std::lock_guard<std::mutex> lk(u_mutex());
                int16_t id = -1;
                for (size_t k = 0; k < u_registry().size(); ++k)
                    if (u_registry()[k].name == nm) { id = (int16_t)k; break; }
                if (id < 0) throw DomainError("FrobSym::parse: unknown generator " + nm);
                FrobSym u;
                u.t_.push_back({{{{2, id, 0}, 1}}, 1});
                g = u;
            }
            term = term * g.pow(e);
            any_factor = true;
            pskip(text, i);
            if (i < text.size() && text[i] == '*') { ++i; continue; }
            break;
        }
        if (!any_factor) throw DomainError("FrobSym::parse: empty term");
        result = result + term * constant(sign * coef);
        pskip(text, i);
    }
    return result;
}

} // namespace drinfeld
