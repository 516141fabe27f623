#include "sst/trace.hpp"

namespace sst {

CsvTraceSink::CsvTraceSink(std::ostream& out) : out_(out) {
    out_ << "cycle,slice_id,spe_id,event,value\n";
}

void CsvTraceSink::on_mac(std::uint64_t cycle, int slice_id, int spe_id) {
    out_ << cycle << ',' << slice_id << ',' << spe_id << ",mac,1\n";
}

void CsvTraceSink::on_capture(std::uint64_t cycle, int slice_id, int spe_id,
                              std::uint32_t value) {
    out_ << cycle << ',' << slice_id << ',' << spe_id << ",capture," << value << '\n';
}

void CsvTraceSink::on_emit(std::uint64_t cycle, int slice_id, int column, std::uint64_t wave) {
    out_ << cycle << ',' << slice_id << ',' << column << ",emit," << wave << '\n';
}

void CsvTraceSink::on_buffer(std::uint64_t cycle, int slice_id, int occupancy) {
    out_ << cycle << ',' << slice_id << ",-1,occupancy," << occupancy << '\n';
}

void TraceAudit::on_mac(std::uint64_t cycle, int slice_id, int spe_id) {
    if (mac_count_by_cycle_.size() <= cycle) mac_count_by_cycle_.resize(cycle + 1, 0);
    ++mac_count_by_cycle_[cycle];
    ++total_macs_;
    auto& act = spe_activity_[{slice_id, spe_id}];
    if (act.count == 0) act.first = cycle;
    act.last = cycle;
    ++act.count;
}

void TraceAudit::on_emit(std::uint64_t cycle, int slice_id, int column, std::uint64_t wave) {
    emissions_[slice_id].push_back(Emission{cycle, column, wave});
}

void TraceAudit::on_buffer(std::uint64_t, int, int occupancy) {
    if (occupancy > max_occupancy_) max_occupancy_ = occupancy;
}

std::uint32_t TraceAudit::macs_in_cycle(std::uint64_t cycle) const {
    return cycle < mac_count_by_cycle_.size() ? mac_count_by_cycle_[cycle] : 0;
}

bool TraceAudit::all_busy(std::uint64_t first, std::uint64_t last,
                          std::uint32_t expected) const {
    for (std::uint64_t c = first; c <= last; ++c) {
        if (macs_in_cycle(c) != expected) return false;
    }
    return true;
}

bool TraceAudit::per_spe_contiguous() const {
    for (const auto& [key, act] : spe_activity_) {
        if (act.count != act.last - act.first + 1) return false;
    }
    return true;
}

bool TraceAudit::column_runs_regular() const {
    for (const auto& [slice, events] : emissions_) {
        if (events.size() % 4 != 0) return false;
        for (std::size_t i = 0; i < events.size(); i += 4) {
            for (std::size_t j = 0; j < 4; ++j) {
                const auto& e = events[i + j];
                if (e.column != static_cast<int>(j)) return false;
                if (e.cycle != events[i].cycle + j) return false;
            }
        }
    }
    return true;
}

std::uint64_t TraceAudit::emissions() const {
    std::uint64_t n = 0;
    for (const auto& [slice, events] : emissions_) n += events.size();
    return n;
}

}  // namespace sst
