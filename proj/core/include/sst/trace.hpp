// trace.hpp - optional per-cycle event sinks for debugging and audits.
#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

namespace sst {

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_mac(std::uint64_t cycle, int slice_id, int spe_id) {}
    virtual void on_capture(std::uint64_t cycle, int slice_id, int spe_id,
                            std::uint32_t value) {}
    virtual void on_emit(std::uint64_t cycle, int slice_id, int column, std::uint64_t wave) {}
    virtual void on_buffer(std::uint64_t cycle, int slice_id, int occupancy) {}
};

// CSV event log: cycle,slice_id,spe_id,event,value
class CsvTraceSink : public TraceSink {
public:
    explicit CsvTraceSink(std::ostream& out);
    void on_mac(std::uint64_t cycle, int slice_id, int spe_id) override;
    void on_capture(std::uint64_t cycle, int slice_id, int spe_id, std::uint32_t value) override;
    void on_emit(std::uint64_t cycle, int slice_id, int column, std::uint64_t wave) override;
    void on_buffer(std::uint64_t cycle, int slice_id, int occupancy) override;

private:
    std::ostream& out_;
};

// Accumulates the statistics needed for utilization and extraction audits.
class TraceAudit : public TraceSink {
public:
    void on_mac(std::uint64_t cycle, int slice_id, int spe_id) override;
    void on_emit(std::uint64_t cycle, int slice_id, int column, std::uint64_t wave) override;
    void on_buffer(std::uint64_t cycle, int slice_id, int occupancy) override;

    std::uint64_t total_macs() const { return total_macs_; }
    int max_buffer_occupancy() const { return max_occupancy_; }

    // Number of MACs observed in the given cycle across all slices.
    std::uint32_t macs_in_cycle(std::uint64_t cycle) const;

    // True when every cycle in [first, last] ran the full complement of MACs.
    bool all_busy(std::uint64_t first, std::uint64_t last, std::uint32_t expected) const;

    // True when each tracked SPE's activity is one contiguous run of cycles.
    bool per_spe_contiguous() const;

    // True when every slice's emissions come in runs of exactly four
    // consecutive cycles covering columns 0,1,2,3 in order.
    bool column_runs_regular() const;

    std::uint64_t emissions() const;

private:
    struct SpeActivity {
        std::uint64_t first = 0;
        std::uint64_t last = 0;
        std::uint64_t count = 0;
    };
    struct Emission {
        std::uint64_t cycle;
        int column;
        std::uint64_t wave;
    };

    std::vector<std::uint32_t> mac_count_by_cycle_;
    std::map<std::pair<int, int>, SpeActivity> spe_activity_;
    std::map<int, std::vector<Emission>> emissions_;
    std::uint64_t total_macs_ = 0;
    int max_occupancy_ = 0;
};

}  // namespace sst
