#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "chain.hpp"

namespace rugscan {

/// RFC 4180 style writer: fields with commas, quotes or newlines are quoted.
class CsvWriter
{
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    CsvWriter& row(std::initializer_list<std::string> fields) { return row(std::vector<std::string>(fields)); }

    CsvWriter& row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            write_field(fields[i]);
        }
        out_ << '\n';
        return *this;
    }

    static std::string field(const Amount& a) { return a.str(); }
    static std::string field(bool b) { return b ? "true" : "false"; }
    static std::string field(double d)
    {
        std::ostringstream s;
        s.precision(10);
        s << d;
        return s.str();
    }
    template <class I>
        requires std::is_integral_v<I>
    static std::string field(I v)
    {
        return std::to_string(v);
    }
    static std::string field(const std::optional<std::int64_t>& ts) { return ts ? std::to_string(*ts) : std::string{}; }

private:
    void write_field(const std::string& f)
    {
        if (f.find_first_of(",\"\n\r") == std::string::npos) {
            out_ << f;
            return;
        }
        out_ << '"';
        for (char c : f) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }

    std::ostream& out_;
};

} // namespace rugscan
