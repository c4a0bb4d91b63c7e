// Deterministic CSV output, optionally gzip-compressed.
#pragma once

#include <string>
#include <vector>

#include "rbmflow/excursion.hpp"
#include "rbmflow/path.hpp"

namespace rbmflow {

/// Round-trip-exact float formatting (%.17g); identical configs produce
/// byte-identical files.
std::string fmt_double(double x);

class CsvSink {
public:
    CsvSink(const std::string& filename, bool gzip);
    ~CsvSink();
    CsvSink(const CsvSink&) = delete;
    CsvSink& operator=(const CsvSink&) = delete;

    void line(const std::string& text);

private:
    struct Impl;
    Impl* impl_;
};

/// Path dump: `step,t,x1..xn,L,contact`.
void write_path_csv(const ReflectedPath& path, CsvSink& sink);

/// Excursion dump: `k,start_idx,end_idx,ell,size,e0_1..e0_n,xk_1..xk_n`.
void write_excursions_csv(const std::vector<ExcursionRecord>& records, int dim, CsvSink& sink);

}  // namespace rbmflow
