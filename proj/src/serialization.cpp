#include "approxop/serialization.hpp"

#include <cmath>

namespace approxop {

namespace {

using nlohmann::json;

double endpoint_from_json(const json& j, double fallback) {
    if (j.is_null()) return fallback;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return Interval::inf;
        if (s == "-inf") return -Interval::inf;
        throw SpecError("interval endpoint must be a number, \"inf\" or \"-inf\"");
    }
    return j.get<double>();
}

json endpoint_to_json(double x) {
    if (x == Interval::inf) return "inf";
    if (x == -Interval::inf) return "-inf";
    return x;
}

Space space_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "gamma") return Space::gamma();
        if (s == "cube") return Space::cube();
        throw SpecError("unknown space \"" + s + "\" (expected gamma, cube or an interval object)");
    }
    if (j.is_object()) {
        Interval dom;
        dom.lo = endpoint_from_json(j.value("lo", json()), -Interval::inf);
        dom.hi = endpoint_from_json(j.value("hi", json()), Interval::inf);
        if (!(dom.lo < dom.hi)) throw SpecError("interval space requires lo < hi");
        return Space::family_domain(dom);
    }
    throw SpecError("space must be a string or an interval object");
}

json space_to_json(const Space& s) {
    switch (s.kind) {
        case Space::Kind::HilbertGamma: return "gamma";
        case Space::Kind::CubeInfty: return "cube";
        case Space::Kind::FamilyDomain:
            return json{{"kind", "interval"},
                        {"lo", endpoint_to_json(s.interval.lo)},
                        {"hi", endpoint_to_json(s.interval.hi)}};
    }
    return "gamma";
}

Tail tail_from_json(const json& j) {
    const std::string kind = j.value("kind", "zero");
    if (kind == "zero") return Tail::zero();
    if (kind == "geometric") {
        if (!j.contains("c") || !j.contains("r"))
            throw SpecError("geometric tail requires fields c and r");
        return Tail::geometric(j.at("c").get<double>(), j.at("r").get<double>());
    }
    throw SpecError("unknown tail kind \"" + kind + "\"");
}

Factor1D factor_from_json(const json& j) {
    const std::string kind = j.value("kind", "");
    if (kind == "constant") return Factor1D::constant(j.at("value").get<double>());
    if (kind == "identity") return Factor1D::identity();
    if (kind == "poly") return Factor1D::poly(j.at("coeffs").get<std::vector<double>>());
    if (kind == "abs-dev") return Factor1D::abs_dev(j.at("center").get<double>());
    throw SpecError("unknown rank factor kind \"" + kind + "\"");
}

json factor_to_json(const Factor1D& f) {
    switch (f.kind()) {
        case Factor1D::Kind::Constant: return json{{"kind", "constant"}, {"value", f.value()}};
        case Factor1D::Kind::Identity: return json{{"kind", "identity"}};
        case Factor1D::Kind::Poly: return json{{"kind", "poly"}, {"coeffs", f.coeffs()}};
        case Factor1D::Kind::AbsDev: return json{{"kind", "abs-dev"}, {"center", f.center()}};
        case Factor1D::Kind::Custom:
            throw SpecError("custom rank factors are programmatic only (not serializable)");
    }
    throw SpecError("unknown factor kind");
}

}  // namespace

json to_json(const SequencePoint& p) {
    json j;
    j["head"] = std::vector<double>(p.head().begin(), p.head().end());
    if (p.tail().is_zero()) {
        j["tail"] = json{{"kind", "zero"}};
    } else {
        j["tail"] = json{{"kind", "geometric"}, {"c", p.tail().c}, {"r", p.tail().r}};
    }
    j["space"] = space_to_json(p.space());
    return j;
}

SequencePoint point_from_json(const json& j) {
    if (!j.is_object()) throw SpecError("point must be an object with a head array");
    std::vector<double> head;
    if (j.contains("head")) head = j.at("head").get<std::vector<double>>();
    Tail tail = j.contains("tail") ? tail_from_json(j.at("tail")) : Tail::zero();
    Space space = j.contains("space") ? space_from_json(j.at("space")) : Space::gamma();
    try {
        return SequencePoint::make(space, std::move(head), tail);
    } catch (const std::domain_error& e) {
        throw SpecError(std::string("invalid point: ") + e.what());
    }
}

json to_json(const MappingDescriptor& d) {
    json j;
    switch (d.form()) {
        case MappingDescriptor::FormKind::One: j["form"] = "one"; break;
        case MappingDescriptor::FormKind::Coord:
            j["form"] = "coord";
            j["j"] = d.coord_index();
            break;
        case MappingDescriptor::FormKind::CoordSq:
            j["form"] = "coordsq";
            j["j"] = d.coord_index();
            break;
        case MappingDescriptor::FormKind::LinearFunctional:
            j["form"] = "linear";
            j["coefficients"] = to_json(d.coefficients());
            break;
        case MappingDescriptor::FormKind::NormSq: j["form"] = "normsq"; break;
        case MappingDescriptor::FormKind::PsiSq:
            j["form"] = "psisq";
            j["center"] = to_json(d.center());
            break;
        case MappingDescriptor::FormKind::Fbar: j["form"] = "fbar"; break;
        case MappingDescriptor::FormKind::RankStructured: {
            j["form"] = "rank";
            json terms = json::array();
            for (const RankTerm& t : d.terms()) {
                json factors = json::array();
                for (const Factor1D& f : t.factors) factors.push_back(factor_to_json(f));
                terms.push_back(json{{"coeff", t.coeff}, {"factors", factors}});
            }
            j["terms"] = terms;
            break;
        }
        case MappingDescriptor::FormKind::BlackBox:
            throw SpecError("black-box mappings are programmatic only (not serializable)");
    }
    if (d.has_tensor())
        j["tensor"] = std::vector<double>(d.tensor().begin(), d.tensor().end());
    return j;
}

MappingDescriptor descriptor_from_json(const json& j) {
    if (!j.is_object() || !j.contains("form"))
        throw SpecError("mapping descriptor must be an object with a \"form\" field");
    const std::string form = j.at("form").get<std::string>();
    MappingDescriptor d = MappingDescriptor::one();
    if (form == "one") {
        d = MappingDescriptor::one();
    } else if (form == "coord") {
        d = MappingDescriptor::coord(j.at("j").get<std::size_t>());
    } else if (form == "coordsq") {
        d = MappingDescriptor::coord_sq(j.at("j").get<std::size_t>());
    } else if (form == "linear") {
        d = MappingDescriptor::linear_functional(point_from_json(j.at("coefficients")));
    } else if (form == "normsq") {
        d = MappingDescriptor::norm_sq();
    } else if (form == "psisq") {
        d = MappingDescriptor::psi_sq(point_from_json(j.at("center")));
    } else if (form == "fbar") {
        d = MappingDescriptor::fbar();
    } else if (form == "rank") {
        std::vector<RankTerm> terms;
        for (const json& jt : j.at("terms")) {
            RankTerm term;
            term.coeff = jt.at("coeff").get<std::vector<double>>();
            for (const json& jf : jt.at("factors")) term.factors.push_back(factor_from_json(jf));
            terms.push_back(std::move(term));
        }
        try {
            d = MappingDescriptor::rank_structured(std::move(terms));
        } catch (const std::domain_error& e) {
            throw SpecError(std::string("invalid rank mapping: ") + e.what());
        }
    } else {
        throw SpecError("unknown mapping form \"" + form + "\"");
    }
    if (j.contains("tensor")) {
        try {
            d = d.tensor_with(j.at("tensor").get<std::vector<double>>());
        } catch (const std::domain_error& e) {
            throw SpecError(std::string("invalid tensor field: ") + e.what());
        }
    }
    return d;
}

KernelFamily family_from_name(const std::string& name) {
    if (name == "bernstein") return KernelFamily::bernstein();
    if (name == "szasz-mirakjan" || name == "szasz") return KernelFamily::szasz_mirakjan();
    if (name == "baskakov") return KernelFamily::baskakov();
    if (name == "post-widder") return KernelFamily::post_widder();
    if (name == "gauss-weierstrass") return KernelFamily::gauss_weierstrass();
    throw SpecError("unknown family \"" + name + "\"");
}

}  // namespace approxop
