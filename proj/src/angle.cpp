#include "trimbirk/angle.hpp"

#include <map>
#include <regex>
#include <string>

#include "trimbirk/diophantine.hpp"
#include "trimbirk/error.hpp"

namespace trimbirk {

namespace {

std::vector<Integer> digit_list(const std::string& body, std::string_view spec) {
    std::vector<Integer> out;
    if (body.empty()) return out;
    std::size_t start = 0;
    while (start <= body.size()) {
        const auto comma = body.find(',', start);
        const std::string item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (item.empty()) throw ValidationError("empty digit in angle '" + std::string(spec) + "'");
        const Integer v = parse_integer(item);
        if (v <= 0) throw DomainError("digits must be positive integers, got " + item);
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string strip_spaces(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    }
    return out;
}

}  // namespace

contfrac::CoefficientStream parse_angle(std::string_view raw) {
    const std::string spec = strip_spaces(raw);
    if (spec == "golden") return contfrac::cfe_of_quadratic(-1, 1, 5, 2);
    if (spec == "silver") return contfrac::cfe_of_quadratic(-1, 1, 2, 1);

    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("angle '" + spec + "' needs a kind prefix (rational: | surd: | digits: | rule:)");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);

    if (kind == "rational") {
        const Rational r = parse_rational(body);
        return contfrac::cfe_of_rational(r.get_num(), r.get_den());
    }
    if (kind == "surd") {
        static const std::regex re(R"(^\(([+-]?\d+)([+-]\d*)\*?sqrt\((\d+)\)\)/([+-]?\d+)$)");
        std::smatch m;
        if (!std::regex_match(body, m, re)) {
            throw ValidationError("surd must look like (a+b*sqrt(d))/c, got '" + body + "'");
        }
        std::string bs = m[2].str();
        if (bs == "+" || bs == "-") bs += "1";
        return contfrac::cfe_of_quadratic(parse_integer(m[1].str()), parse_integer(bs), parse_integer(m[3].str()),
                                          parse_integer(m[4].str()));
    }
    if (kind == "digits") {
        if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
            throw ValidationError("digits must be bracketed, got '" + body + "'");
        }
        const std::string inner = body.substr(1, body.size() - 2);
        if (const auto semi = inner.find(';'); semi != std::string::npos) {
            auto period = digit_list(inner.substr(semi + 1), spec);
            if (period.empty()) throw ValidationError("empty repeating block in '" + spec + "'");
            return contfrac::CoefficientStream::periodic(digit_list(inner.substr(0, semi), spec), std::move(period));
        }
        auto digits = digit_list(inner, spec);
        if (digits.empty()) throw ValidationError("empty digit list in '" + spec + "'");
        return contfrac::CoefficientStream::finite(std::move(digits));
    }
    if (kind == "rule") {
        const auto open = body.find('(');
        if (open == std::string::npos || body.back() != ')') {
            throw ValidationError("rule must look like name(key=value;...), got '" + body + "'");
        }
        const std::string name = body.substr(0, open);
        const std::string args = body.substr(open + 1, body.size() - open - 2);
        std::map<std::string, std::string> params;
        std::size_t start = 0;
        while (start < args.size()) {
            const auto semi = args.find(';', start);
            const std::string item = args.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ValidationError("rule parameter needs key=value, got '" + item + "'");
            params[item.substr(0, eq)] = item.substr(eq + 1);
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        return diophantine::named_rule(name, params);
    }
    throw ValidationError("unknown angle kind '" + kind + "'");
}

}  // namespace trimbirk
