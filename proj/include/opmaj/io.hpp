#pragma once

// Plain-text formats for operators, profiles, vectors, and matrices, plus
// the CSV emitter for scale-integral curves. Every parse-level failure is
// reported as IoError with file and line context.

#include <iosfwd>
#include <string>
#include <vector>

#include "opmaj/finite.hpp"
#include "opmaj/majorize.hpp"
#include "opmaj/spectral.hpp"

namespace opmaj {

// "stepop v1 <inf|fin>" then one "value weight" per line. Values are exact
// decimals or p/q; weights are positive rationals or "inf". '#' starts a
// comment.
StepOperator read_operator(const std::string& path);

// "profile v1" then one "value mult" per line, mult a positive integer or
// "inf"; the profile is ambient exactly when an infinite entry appears.
Profile read_profile(const std::string& path);

// "vector v1" then whitespace-separated rational entries.
std::vector<Rat> read_vector(const std::string& path);

// "matrix v1 n m" then n*m rational entries in row-major order.
RatMat read_matrix(const std::string& path);

void write_operator(std::ostream& os, const StepOperator& op);
void write_profile(std::ostream& os, const Profile& p);
void write_vector(std::ostream& os, const std::vector<Rat>& v);
void write_matrix(std::ostream& os, const RatMat& M);

// One-line rendering for messages.
std::string op_str(const StepOperator& op);

// Upper and lower scale integrals of both operators, sampled at every knot
// of the four curves plus ten unit steps past the last knot. Deterministic:
// equal inputs give byte-identical output.
void emit_curves(std::ostream& os, const StepOperator& a, const StepOperator& b);

}  // namespace opmaj
