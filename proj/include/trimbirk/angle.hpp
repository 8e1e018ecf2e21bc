#pragma once

#include <string_view>

#include "trimbirk/contfrac.hpp"

namespace trimbirk {

/// Textual angle specifications shared by every subcommand:
///
///   rational:p/q                 finite expansion of p/q in (0,1)
///   surd:(a+b*sqrt(d))/c         periodic expansion, exact value kept
///   digits:[a1,a2,...]           finite digit list
///   digits:[h1,...;r1,...]       preperiod h, repeating block r
///   rule:<name>(k=v;k=v;...)     generated stream, see diophantine::named_rule
///   golden | silver              (sqrt(5)-1)/2 and sqrt(2)-1
///
/// Throws ValidationError on malformed text and DomainError on values
/// outside (0,1).
contfrac::CoefficientStream parse_angle(std::string_view spec);

}  // namespace trimbirk
