#pragma once

// JSON and CSV rendering of results. Exact rationals and big integers are
// written as decimal strings ("num/den") so no precision is lost; doubles use
// the shortest round-trip form, and non-finite values become "inf", "-inf" or
// "nan" strings.

#include <string>
#include <vector>

#include <json.hpp>

#include "trimbirk/contfrac.hpp"
#include "trimbirk/diophantine.hpp"
#include "trimbirk/experiments.hpp"
#include "trimbirk/trimsum.hpp"

namespace trimbirk::report {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "trimbirk-report/1";
inline constexpr const char* tool_version = "0.1.0";

json number(double v);
json exact(const Rational& v);
json exact(const Integer& v);

json to_json(const experiments::AngleInfo& a);
json to_json(const experiments::SampleDesign& d);
json to_json(const trimsum::TrimmedSumResult& r);
json to_json(const trimsum::ClusterGapReport& r);
json to_json(const experiments::LawReport& r);
json to_json(const experiments::IntervalUnion& u);
json to_json(const experiments::OscillationReport& r);
json to_json(const experiments::OscBetaReport& r);
json to_json(const experiments::PointOscReport& r);
json to_json(const experiments::QnBoundSuite& s);
json to_json(const std::vector<experiments::LogPropPoint>& points);
json to_json(const diophantine::DiophantineReport& r);
json to_json(const diophantine::ConditionTrajectory& t);

/// {schema, tool_version, command, config, angle, result}
json envelope(const std::string& command, const json& config, const json& angle, const json& result);

/// Columns: N,x_index,ratio,k,d
std::string law_csv(const experiments::LawReport& r);
/// Columns: set,index,x,member,k,sum
std::string oscillation_csv(const experiments::OscillationReport& r);
/// Columns: rank,j,value
std::string sum_csv(const trimsum::TrimmedSumResult& r);
/// Columns: n,q_n,x_index,x,lhs,bound,pass
std::string qn_csv(const experiments::QnBoundSuite& s);

/// Writes text to path; throws IoError when the file cannot be written.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace trimbirk::report
