#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "sitelens/core/strings.hpp"

namespace sitelens {

/// Officially assigned ISO 3166-1 alpha-2 codes.
inline const std::set<std::string>& iso_alpha2_codes() {
    static const std::set<std::string> codes = {
        "AD", "AE", "AF", "AG", "AI", "AL", "AM", "AO", "AQ", "AR", "AS", "AT", "AU", "AW",
        "AX", "AZ", "BA", "BB", "BD", "BE", "BF", "BG", "BH", "BI", "BJ", "BL", "BM", "BN",
        "BO", "BQ", "BR", "BS", "BT", "BV", "BW", "BY", "BZ", "CA", "CC", "CD", "CF", "CG",
        "CH", "CI", "CK", "CL", "CM", "CN", "CO", "CR", "CU", "CV", "CW", "CX", "CY", "CZ",
        "DE", "DJ", "DK", "DM", "DO", "DZ", "EC", "EE", "EG", "EH", "ER", "ES", "ET", "FI",
        "FJ", "FK", "FM", "FO", "FR", "GA", "GB", "GD", "GE", "GF", "GG", "GH", "GI", "GL",
        "GM", "GN", "GP", "GQ", "GR", "GS", "GT", "GU", "GW", "GY", "HK", "HM", "HN", "HR",
        "HT", "HU", "ID", "IE", "IL", "IM", "IN", "IO", "IQ", "IR", "IS", "IT", "JE", "JM",
        "JO", "JP", "KE", "KG", "KH", "KI", "KM", "KN", "KP", "KR", "KW", "KY", "KZ", "LA",
        "LB", "LC", "LI", "LK", "LR", "LS", "LT", "LU", "LV", "LY", "MA", "MC", "MD", "ME",
        "MF", "MG", "MH", "MK", "ML", "MM", "MN", "MO", "MP", "MQ", "MR", "MS", "MT", "MU",
        "MV", "MW", "MX", "MY", "MZ", "NA", "NC", "NE", "NF", "NG", "NI", "NL", "NO", "NP",
        "NR", "NU", "NZ", "OM", "PA", "PE", "PF", "PG", "PH", "PK", "PL", "PM", "PN", "PR",
        "PS", "PT", "PW", "PY", "QA", "RE", "RO", "RS", "RU", "RW", "SA", "SB", "SC", "SD",
        "SE", "SG", "SH", "SI", "SJ", "SK", "SL", "SM", "SN", "SO", "SR", "SS", "ST", "SV",
        "SX", "SY", "SZ", "TC", "TD", "TF", "TG", "TH", "TJ", "TK", "TL", "TM", "TN", "TO",
        "TR", "TT", "TV", "TW", "TZ", "UA", "UG", "UM", "US", "UY", "UZ", "VA", "VC", "VE",
        "VG", "VI", "VN", "VU", "WF", "WS", "YE", "YT", "ZA", "ZM", "ZW",
    };
    return codes;
}

inline bool is_iso_alpha2(std::string_view code) {
    return code.size() == 2 && iso_alpha2_codes().count(std::string(code)) > 0;
}

/// English country names (lowercased) to alpha-2 codes. Used to canonicalize
/// free-form country strings coming back from language models.
inline const std::map<std::string, std::string>& country_name_table() {
    static const std::map<std::string, std::string> table = {
        {"afghanistan", "AF"}, {"albania", "AL"}, {"algeria", "DZ"}, {"argentina", "AR"},
        {"armenia", "AM"}, {"australia", "AU"}, {"austria", "AT"}, {"azerbaijan", "AZ"},
        {"bangladesh", "BD"}, {"belarus", "BY"}, {"belgium", "BE"}, {"bolivia", "BO"},
        {"bosnia and herzegovina", "BA"}, {"brazil", "BR"}, {"bulgaria", "BG"},
        {"cambodia", "KH"}, {"canada", "CA"}, {"chile", "CL"}, {"china", "CN"},
        {"colombia", "CO"}, {"costa rica", "CR"}, {"croatia", "HR"}, {"cuba", "CU"},
        {"cyprus", "CY"}, {"czech republic", "CZ"}, {"czechia", "CZ"}, {"denmark", "DK"},
        {"dominican republic", "DO"}, {"ecuador", "EC"}, {"egypt", "EG"},
        {"el salvador", "SV"}, {"estonia", "EE"}, {"ethiopia", "ET"}, {"finland", "FI"},
        {"france", "FR"}, {"georgia", "GE"}, {"germany", "DE"}, {"ghana", "GH"},
        {"greece", "GR"}, {"guatemala", "GT"}, {"honduras", "HN"}, {"hong kong", "HK"},
        {"hungary", "HU"}, {"iceland", "IS"}, {"india", "IN"}, {"indonesia", "ID"},
        {"iran", "IR"}, {"iraq", "IQ"}, {"ireland", "IE"}, {"israel", "IL"},
        {"italy", "IT"}, {"jamaica", "JM"}, {"japan", "JP"}, {"jordan", "JO"},
        {"kazakhstan", "KZ"}, {"kenya", "KE"}, {"korea", "KR"}, {"kuwait", "KW"},
        {"latvia", "LV"}, {"lebanon", "LB"}, {"lithuania", "LT"}, {"luxembourg", "LU"},
        {"malaysia", "MY"}, {"malta", "MT"}, {"mexico", "MX"}, {"moldova", "MD"},
        {"mongolia", "MN"}, {"montenegro", "ME"}, {"morocco", "MA"}, {"myanmar", "MM"},
        {"nepal", "NP"}, {"netherlands", "NL"}, {"new zealand", "NZ"}, {"nicaragua", "NI"},
        {"nigeria", "NG"}, {"north korea", "KP"}, {"north macedonia", "MK"},
        {"norway", "NO"}, {"oman", "OM"}, {"pakistan", "PK"}, {"panama", "PA"},
        {"paraguay", "PY"}, {"peru", "PE"}, {"philippines", "PH"}, {"poland", "PL"},
        {"portugal", "PT"}, {"qatar", "QA"}, {"romania", "RO"}, {"russia", "RU"},
        {"russian federation", "RU"}, {"saudi arabia", "SA"}, {"serbia", "RS"},
        {"singapore", "SG"}, {"slovakia", "SK"}, {"slovenia", "SI"},
        {"south africa", "ZA"}, {"south korea", "KR"}, {"spain", "ES"},
        {"sri lanka", "LK"}, {"sweden", "SE"}, {"switzerland", "CH"}, {"syria", "SY"},
        {"taiwan", "TW"}, {"tanzania", "TZ"}, {"thailand", "TH"}, {"tunisia", "TN"},
        {"turkey", "TR"}, {"turkiye", "TR"}, {"ukraine", "UA"},
        {"united arab emirates", "AE"}, {"uae", "AE"}, {"united kingdom", "GB"},
        {"uk", "GB"}, {"great britain", "GB"}, {"britain", "GB"},
        {"united states", "US"}, {"united states of america", "US"}, {"usa", "US"},
        {"america", "US"}, {"uruguay", "UY"}, {"uzbekistan", "UZ"}, {"venezuela", "VE"},
        {"vietnam", "VN"}, {"viet nam", "VN"}, {"yemen", "YE"}, {"zimbabwe", "ZW"},
    };
    return table;
}

/// Resolves an alpha-2 code or an English country name to the alpha-2 code.
inline std::optional<std::string> resolve_country_code(std::string_view text) {
    std::string lowered = to_lower(trim(text));
    if (lowered.empty()) return std::nullopt;
    std::string upper = to_upper(lowered);
    if (is_iso_alpha2(upper)) return upper;
    auto it = country_name_table().find(lowered);
    if (it != country_name_table().end()) return it->second;
    return std::nullopt;
}

}  // namespace sitelens
