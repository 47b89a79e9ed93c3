#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "skyinv/pipeline.hpp"

namespace skyinv {

/// A malformed input; `line` is 1-based, 0 when not tied to a line.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what : what), line(line_) {}
};

/**
 * @brief Reads a presentation. The native format is
 *
 *     skypres v1
 *     field <q>
 *     generators <m>
 *     <x> <y>                      (m lines)
 *     relations <n>
 *     <x> <y> : <row> <coef> ...   (n lines)
 *
 * with '#' comments. Files starting with `scc2020` go through a small import shim (two parameters,
 * a presentation given as relations then generators); their field comes from `field_override` or defaults to 2.
 */
GradedMatrix parse_presentation(std::istream& in, std::optional<elem> field_override = {});
GradedMatrix read_presentation_file(const std::string& path, std::optional<elem> field_override = {});
void write_presentation(std::ostream& out, const GradedMatrix& m);

/// Decimal string of a rational: exact when the expansion terminates, else 12 significant digits.
std::string decimal(const Rational& r);

void write_store_csv(std::ostream& out, const SkyscraperStore& store);
SkyscraperStore parse_store_csv(std::istream& in);
/// true if the stream holds a store CSV rather than a presentation; does not consume input
bool looks_like_store_csv(std::istream& in);

void write_landscape_csv(std::ostream& out, const vec<LandscapeRow>& rows);
/// one row per tree node: its summand, cell, parent, slope polynomial and region vertices
void write_subdivision_csv(std::ostream& out, const ExactSkyscraper& ex);

} // namespace skyinv
