#include "skyinv/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace skyinv {

namespace {

struct LineReader {
    std::istream& in;
    int line = 0;

    /// next non-empty line with comments stripped
    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            auto b = raw.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            auto e = raw.find_last_not_of(" \t\r");
            out = raw.substr(b, e - b + 1);
            return true;
        }
        return false;
    }
    std::string need(const char* what) {
        std::string s;
        if (!next(s)) throw ParseError(line + 1, std::string("unexpected end of input, expected ") + what);
        return s;
    }
};

vec<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    vec<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

vec<std::string> split(const std::string& s, char sep) {
    vec<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

Rational number(const std::string& s, int line) {
    try {
        return Rational::parse(s);
    } catch (const std::exception& e) {
        throw ParseError(line, "bad number '" + s + "'");
    }
}

long integer(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "bad integer '" + s + "'");
    }
}

long counted(const std::string& s, const char* keyword, int line) {
    auto t = split_ws(s);
    if (t.size() != 2 || t[0] != keyword) throw ParseError(line, std::string("expected '") + keyword + " <count>'");
    long n = integer(t[1], line);
    if (n < 0) throw ParseError(line, "negative count");
    return n;
}

void check_homogeneous(const GradedMatrix& m, int col, int line) {
    for (auto& [r, c] : m.columns[col])
        if (!leq(m.row_degrees[r], m.col_degrees[col]))
            throw ParseError(line, "inhomogeneous entry: row " + std::to_string(r) + " at " +
                                       m.row_degrees[r].x.str() + "," + m.row_degrees[r].y.str() +
                                       " is not below its relation at " + m.col_degrees[col].x.str() + "," +
                                       m.col_degrees[col].y.str());
}

PrimeField make_field(long q, int line) {
    if (q < 2 || q > 65536 || !PrimeField::is_prime((std::uint64_t)q)) throw ParseError(line, "field size must be a prime");
    return PrimeField((elem)q);
}

GradedMatrix parse_scc2020(LineReader& rd, std::optional<elem> field_override) {
    // scc2020 / 2 parameters / counts "n_rel n_gen 0", then relation lines "x y ; i ..." and generator lines "x y ;"
    PrimeField f = make_field(field_override ? *field_override : 2, rd.line);
    std::string s = rd.need("parameter count");
    if (integer(s, rd.line) != 2) throw ParseError(rd.line, "only two-parameter inputs are supported");
    auto counts = split_ws(rd.need("block sizes"));
    if (counts.size() < 2) throw ParseError(rd.line, "expected block sizes");
    long nrel = integer(counts[0], rd.line), ngen = integer(counts[1], rd.line);
    for (std::size_t i = 2; i < counts.size(); ++i)
        if (integer(counts[i], rd.line) != 0) throw ParseError(rd.line, "only presentations are supported");
    struct Rel {
        Degree d;
        SparseColumn col;
        int line;
    };
    vec<Rel> rels;
    for (long i = 0; i < nrel; ++i) {
        auto parts = split(rd.need("relation"), ';');
        if (parts.size() != 2) throw ParseError(rd.line, "expected 'x y ; indices'");
        auto xy = split_ws(parts[0]);
        if (xy.size() != 2) throw ParseError(rd.line, "expected two coordinates");
        Rel r{{number(xy[0], rd.line), number(xy[1], rd.line)}, {}, rd.line};
        for (auto& t : split_ws(parts[1])) {
            auto ic = split(t, ':');
            long row = integer(ic[0], rd.line);
            long c = ic.size() > 1 ? integer(ic[1], rd.line) : 1;
            if (row < 0 || row >= ngen) throw ParseError(rd.line, "row index out of range");
            if (c < 0 || c >= (long)f.q()) throw ParseError(rd.line, "coefficient out of range");
            if (c) r.col.push_back({(int)row, (elem)c});
        }
        rels.push_back(std::move(r));
    }
    GradedMatrix m(f);
    for (long i = 0; i < ngen; ++i) {
        auto parts = split(rd.need("generator"), ';');
        auto xy = split_ws(parts[0]);
        if (xy.size() != 2) throw ParseError(rd.line, "expected two coordinates");
        m.add_row({number(xy[0], rd.line), number(xy[1], rd.line)});
    }
    for (auto& r : rels) {
        m.add_column(r.d, r.col);
        check_homogeneous(m, m.cols() - 1, r.line);
    }
    return m;
}

} // namespace

GradedMatrix parse_presentation(std::istream& in, std::optional<elem> field_override) {
    LineReader rd{in};
    std::string s = rd.need("header");
    if (split_ws(s) == vec<std::string>{"scc2020"}) return parse_scc2020(rd, field_override);
    if (split_ws(s) != vec<std::string>{"skypres", "v1"}) throw ParseError(rd.line, "expected header 'skypres v1'");

    auto ft = split_ws(rd.need("field"));
    if (ft.size() != 2 || ft[0] != "field") throw ParseError(rd.line, "expected 'field <q>'");
    PrimeField f = make_field(integer(ft[1], rd.line), rd.line);
    if (field_override && *field_override != f.q())
        throw ParseError(rd.line, "field " + ft[1] + " differs from the requested field " + std::to_string(*field_override));

    GradedMatrix m(f);
    long ngen = counted(rd.need("generators"), "generators", rd.line);
    for (long i = 0; i < ngen; ++i) {
        auto xy = split_ws(rd.need("generator degree"));
        if (xy.size() != 2) throw ParseError(rd.line, "expected '<x> <y>'");
        m.add_row({number(xy[0], rd.line), number(xy[1], rd.line)});
    }
    long nrel = counted(rd.need("relations"), "relations", rd.line);
    for (long i = 0; i < nrel; ++i) {
        auto parts = split(rd.need("relation"), ':');
        if (parts.size() != 2) throw ParseError(rd.line, "expected '<x> <y> : <row> <coef> ...'");
        auto xy = split_ws(parts[0]);
        if (xy.size() != 2) throw ParseError(rd.line, "expected two coordinates before ':'");
        auto ent = split_ws(parts[1]);
        if (ent.size() % 2) throw ParseError(rd.line, "entries come in '<row> <coef>' pairs");
        vec<elem> dense(m.rows(), 0);
        for (std::size_t k = 0; k < ent.size(); k += 2) {
            long row = integer(ent[k], rd.line), c = integer(ent[k + 1], rd.line);
            if (row < 0 || row >= m.rows()) throw ParseError(rd.line, "row index " + ent[k] + " out of range");
            if (c < 0 || c >= (long)f.q()) throw ParseError(rd.line, "coefficient " + ent[k + 1] + " out of range");
            dense[row] = f.add(dense[row], (elem)c);
        }
        SparseColumn col;
        for (int r = 0; r < m.rows(); ++r)
            if (dense[r]) col.push_back({r, dense[r]});
        m.add_column({number(xy[0], rd.line), number(xy[1], rd.line)}, col);
        check_homogeneous(m, m.cols() - 1, rd.line);
    }
    std::string extra;
    if (rd.next(extra)) throw ParseError(rd.line, "trailing content after the relations block");
    return m;
}

GradedMatrix read_presentation_file(const std::string& path, std::optional<elem> field_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_presentation(in, field_override);
}

void write_presentation(std::ostream& out, const GradedMatrix& m) {
    out << "skypres v1\nfield " << m.field.q() << "\ngenerators " << m.rows() << "\n";
    for (auto& d : m.row_degrees) out << d.x << " " << d.y << "\n";
    out << "relations " << m.cols() << "\n";
    for (int c = 0; c < m.cols(); ++c) {
        out << m.col_degrees[c].x << " " << m.col_degrees[c].y << " :";
        for (auto& [r, v] : m.columns[c]) out << " " << r << " " << v;
        out << "\n";
    }
}

std::string decimal(const Rational& r) {
    std::int64_t d = r.den();
    int twos = 0, fives = 0;
    while (d % 2 == 0) d /= 2, ++twos;
    while (d % 5 == 0) d /= 5, ++fives;
    int digits = std::max(twos, fives);
    if (d != 1 || digits > 15) {
        std::ostringstream os;
        os << std::setprecision(12) << r.to_double();
        return os.str();
    }
    // exact: scale to an integer numerator over 10^digits
    __int128 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    __int128 v = (__int128)r.num() * (scale / r.den());
    bool neg = v < 0;
    if (neg) v = -v;
    std::string s;
    for (__int128 t = v; t > 0 || (int)s.size() <= digits; t /= 10) s.insert(s.begin(), char('0' + (int)(t % 10)));
    if (digits > 0) s.insert(s.end() - digits, '.');
    return neg ? "-" + s : s;
}

// ---------------------------------------------------------------- stores

namespace {

const char* kStoreHeader = "alpha_x,alpha_y,factor,slope_num,slope_den,stair_gen_x,stair_gen_y,stair_rels";

} // namespace

void write_store_csv(std::ostream& out, const SkyscraperStore& store) {
    if (store.epsilon) out << "# epsilon=" << *store.epsilon << "\n";
    out << kStoreHeader << "\n";
    for (auto& [a, l] : store.entries)
        for (std::size_t i = 0; i < l.factors.size(); ++i)
            for (auto& st : l.factors[i].staircases) {
                out << a.x << "," << a.y << "," << i << "," << l.factors[i].slope.num() << ","
                    << l.factors[i].slope.den() << "," << st.gen.x << "," << st.gen.y << ",";
                for (std::size_t k = 0; k < st.rels.size(); ++k)
                    out << (k ? ";" : "") << st.rels[k].x << ":" << st.rels[k].y;
                out << "\n";
            }
}

bool looks_like_store_csv(std::istream& in) {
    auto pos = in.tellg();
    std::string line;
    bool csv = false;
    while (std::getline(in, line)) {
        if (line.rfind("# epsilon=", 0) == 0) continue;
        csv = line.rfind("alpha_x,", 0) == 0;
        break;
    }
    in.clear();
    in.seekg(pos);
    return csv;
}

SkyscraperStore parse_store_csv(std::istream& in) {
    SkyscraperStore store;
    std::string raw;
    int line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        if (raw[0] == '#') {
            if (raw.rfind("# epsilon=", 0) == 0) store.epsilon = number(raw.substr(10), line);
            continue;
        }
        if (!header) {
            if (raw != kStoreHeader) throw ParseError(line, "expected the store CSV header");
            header = true;
            continue;
        }
        auto f = split(raw, ',');
        if (f.size() != 8) throw ParseError(line, "expected 8 fields");
        Degree a{number(f[0], line), number(f[1], line)};
        long idx = integer(f[2], line);
        Rational slope(integer(f[3], line), integer(f[4], line));
        Staircase st{{number(f[5], line), number(f[6], line)}, {}};
        if (!f[7].empty())
            for (auto& r : split(f[7], ';')) {
                auto xy = split(r, ':');
                if (xy.size() != 2) throw ParseError(line, "bad relation '" + r + "'");
                st.rels.push_back({number(xy[0], line), number(xy[1], line)});
            }
        HNFactorList& l = store.entries[a];
        l.alpha = a;
        if (idx == (long)l.factors.size()) {
            l.factors.push_back({{}, slope});
        } else if (idx != (long)l.factors.size() - 1 || l.factors.back().slope != slope) {
            throw ParseError(line, "factor rows out of order");
        }
        l.factors.back().staircases.push_back(std::move(st));
    }
    if (!header) throw ParseError(line, "missing store CSV header");
    return store;
}

void write_landscape_csv(std::ostream& out, const vec<LandscapeRow>& rows) {
    out << "x,y,k,theta,lambda\n";
    for (auto& r : rows)
        out << decimal(r.x) << "," << decimal(r.y) << "," << r.k << "," << decimal(r.theta) << "," << decimal(r.lambda)
            << "\n";
}

void write_subdivision_csv(std::ostream& out, const ExactSkyscraper& ex) {
    out << "summand,cell_x,cell_y,node,parent,c0,cy,cx,region\n";
    for (std::size_t s = 0; s < ex.parts.size(); ++s)
        for (auto& [c, tree] : ex.parts[s].cells)
            for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
                const SubdivNode& nd = tree.nodes[k];
                out << s << "," << tree.alpha.x << "," << tree.alpha.y << "," << k << "," << nd.parent << ","
                    << nd.poly.c0 << "," << nd.poly.cy << "," << nd.poly.cx << ",";
                for (std::size_t v = 0; v < nd.region.vertices.size(); ++v)
                    out << (v ? ";" : "") << tree.alpha.x + nd.region.vertices[v].first << ":"
                        << tree.alpha.y + nd.region.vertices[v].second;
                out << "\n";
            }
}

} // namespace skyinv
