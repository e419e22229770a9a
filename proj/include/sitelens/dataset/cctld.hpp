#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "sitelens/core/countries.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"

namespace sitelens::dataset {

/// Country-code TLD suffixes mapped to ISO country codes, plus the set of
/// generic TLDs whose sites need manual/model labeling.
struct CcTldMap {
    std::map<std::string, std::string> cc;
    std::set<std::string> generic;

    /// 20 ccTLDs; fully overridable via config.
    static CcTldMap defaults() {
        CcTldMap map;
        map.cc = {
            {"de", "DE"}, {"fr", "FR"}, {"it", "IT"}, {"co.uk", "GB"}, {"nl", "NL"},
            {"pl", "PL"}, {"es", "ES"}, {"br", "BR"}, {"in", "IN"},    {"jp", "JP"},
            {"ru", "RU"}, {"cn", "CN"}, {"au", "AU"}, {"ca", "CA"},    {"tr", "TR"},
            {"se", "SE"}, {"ch", "CH"}, {"ir", "IR"}, {"vn", "VN"},    {"id", "ID"},
        };
        map.generic = {"com", "net", "org", "io"};
        return map;
    }

    void validate() const {
        for (const auto& [tld, code] : cc) {
            if (tld.empty()) raise(ErrorCode::ConfigError, "empty ccTLD key");
            if (generic.count(tld))
                raise(ErrorCode::ConfigError, "TLD '" + tld + "' is both country and generic");
            if (!is_iso_alpha2(code) && code != "international")
                raise(ErrorCode::ConfigError,
                      "ccTLD '" + tld + "' maps to invalid country '" + code + "'");
        }
    }
};

enum class TldClass { Country, Generic, Unknown };

struct TldLabel {
    TldClass kind = TldClass::Unknown;
    std::string country;      // set when kind == Country
    std::string matched_tld;  // the map key or generic TLD that matched
};

/// Longest-suffix classification of a domain's TLD. Total: anything that
/// matches neither the country map nor the generic set is Unknown.
inline TldLabel tld_country_label(std::string_view domain, const CcTldMap& map) {
    // Scan dot-suffixes longest first so "co.uk" beats "uk".
    std::size_t pos = 0;
    while (true) {
        std::string key(domain.substr(pos));
        if (auto it = map.cc.find(key); it != map.cc.end())
            return {TldClass::Country, it->second, key};
        if (map.generic.count(key)) return {TldClass::Generic, "", key};
        std::size_t dot = domain.find('.', pos);
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return {TldClass::Unknown, "", ""};
}

}  // namespace sitelens::dataset
