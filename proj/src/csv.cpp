#include "rbmflow/csv.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>

#include "rbmflow/errors.hpp"

namespace rbmflow {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct CsvSink::Impl {
    std::ofstream file;
    gzFile gz = nullptr;
};

CsvSink::CsvSink(const std::string& filename, bool gzip) : impl_(new Impl) {
    if (gzip) {
        impl_->gz = gzopen(filename.c_str(), "wb");
        if (!impl_->gz) throw Error("cannot open for writing: " + filename);
    } else {
        impl_->file.open(filename, std::ios::binary);
        if (!impl_->file) throw Error("cannot open for writing: " + filename);
    }
}

CsvSink::~CsvSink() {
    if (impl_->gz) gzclose(impl_->gz);
    delete impl_;
}

void CsvSink::line(const std::string& text) {
    if (impl_->gz) {
        gzwrite(impl_->gz, text.data(), static_cast<unsigned>(text.size()));
        gzwrite(impl_->gz, "\n", 1);
    } else {
        impl_->file << text << '\n';
    }
}

void write_path_csv(const ReflectedPath& path, CsvSink& sink) {
    std::string header = "step,t";
    for (int i = 1; i <= path.dim(); ++i) header += ",x" + std::to_string(i);
    header += ",L,contact";
    sink.line(header);

    for (std::size_t k = 0; k < path.size(); ++k) {
        std::string row = std::to_string(k) + "," + fmt_double(path.time(k));
        const Vec x = path.position(k);
        for (int i = 0; i < path.dim(); ++i) row += "," + fmt_double(x(i));
        row += "," + fmt_double(path.local_time(k));
        row += path.contact(k) ? ",1" : ",0";
        sink.line(row);
    }
}

void write_excursions_csv(const std::vector<ExcursionRecord>& records, int dim, CsvSink& sink) {
    std::string header = "k,start_idx,end_idx,ell,size";
    for (int i = 1; i <= dim; ++i) header += ",e0_" + std::to_string(i);
    for (int i = 1; i <= dim; ++i) header += ",xk_" + std::to_string(i);
    sink.line(header);

    for (std::size_t k = 0; k < records.size(); ++k) {
        const ExcursionRecord& rec = records[k];
        std::string row = std::to_string(k) + "," + std::to_string(rec.start_idx) + "," +
                          std::to_string(rec.end_idx) + "," + fmt_double(rec.ell) + "," +
                          fmt_double(rec.size);
        for (int i = 0; i < dim; ++i) row += "," + fmt_double(rec.left_endpoint(i));
        for (int i = 0; i < dim; ++i) row += "," + fmt_double(rec.right_endpoint(i));
        sink.line(row);
    }
}

}  // namespace rbmflow
