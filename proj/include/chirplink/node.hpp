#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chirplink/airtime.hpp"
#include "chirplink/channel.hpp"
#include "chirplink/frame.hpp"
#include "chirplink/text.hpp"

namespace chirplink {

// Timestamped node activity.  RxDetect abstracts the modem's packet-ready
// interrupt; TxEncodeFail covers the transmitter's abort path.
enum class EventKind {
    TxStart, TxEnd, TxEncodeFail,
    RxDetect, RxDecodeOk, RxDecodeFail,
    LcdUpdate, UploadStart, UploadDone,
};

inline const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::TxStart: return "TxStart";
    case EventKind::TxEnd: return "TxEnd";
    case EventKind::TxEncodeFail: return "TxEncodeFail";
    case EventKind::RxDetect: return "RxDetect";
    case EventKind::RxDecodeOk: return "RxDecodeOk";
    case EventKind::RxDecodeFail: return "RxDecodeFail";
    case EventKind::LcdUpdate: return "LcdUpdate";
    case EventKind::UploadStart: return "UploadStart";
    case EventKind::UploadDone: return "UploadDone";
    }
    return "?";
}

struct NodeEvent {
    double timestamp = 0.0; // simulated seconds
    std::string node_id;
    EventKind kind = EventKind::TxStart;
    std::string detail;
};

// One line-delimited record per event.
inline std::string event_to_jsonl(const NodeEvent& ev) {
    nlohmann::json j;
    j["timestamp"] = ev.timestamp;
    j["node_id"] = ev.node_id;
    j["kind"] = to_string(ev.kind);
    j["detail"] = ev.detail;
    return j.dump();
}

// Processing-time constants.  The defaults are the desk-scenario calibration:
// together with the 16-byte reference frame's 1.318912 s airtime they place
// the mean transmit-to-upload latency at 3.198912 s.
struct NodeDelays {
    double build_s = 0.10;
    double decode_s = 0.15;
    double display_s = 0.05;
    double upload_s = 1.58;

    static NodeDelays zero() { return {0.0, 0.0, 0.0, 0.0}; }
};

// ---------------------------------------------------------------------------
// 16x2 LCD rendering
// ---------------------------------------------------------------------------

struct LcdFrame {
    std::array<std::array<char, 16>, 2> rows{};

    LcdFrame() {
        for (auto& row : rows) row.fill(' ');
    }

    std::string row_string(int r) const { return std::string(rows[r].begin(), rows[r].end()); }
};

// Characters 0-15 on row 1, 16-31 on row 2, the rest dropped; short rows are
// space padded.  Codepoints outside printable ASCII render as '?'.
inline LcdFrame render_lcd(std::string_view text) {
    LcdFrame frame;
    const auto cps = utf8_codepoints(text);
    for (std::size_t i = 0; i < cps.size() && i < 32; ++i) {
        const char cell = (cps[i] >= 0x20 && cps[i] <= 0x7E) ? static_cast<char>(cps[i]) : '?';
        frame.rows[i / 16][i % 16] = cell;
    }
    return frame;
}

inline std::string lcd_ascii_art(const LcdFrame& frame) {
    std::string art = "+----------------+\n";
    art += "|" + frame.row_string(0) + "|\n";
    art += "|" + frame.row_string(1) + "|\n";
    art += "+----------------+";
    return art;
}

// ---------------------------------------------------------------------------
// Transmitter
// ---------------------------------------------------------------------------

enum class TxState { Init, Building, Transmitting, Waiting };

struct TxStepResult {
    std::optional<SymbolBlock> transmission; // present on TxStart
    std::vector<NodeEvent> events;
};

// Cycles Init -> Building -> Transmitting -> Waiting -> Building...  Each
// step() performs the transition scheduled at next_time(); callers advance
// simulated time to that instant first.  TxStart marks the beginning of the
// on-air interval, so TxEnd - TxStart equals time_on_air exactly and the
// message's origination instant is TxStart - build_s.
class TxNode {
public:
    TxNode(RadioConfig cfg, std::string message, double inter_send_delay_s,
           NodeDelays delays = {}, std::string node_id = "tx", double start_time = 0.0)
        : cfg_(std::move(cfg)), message_(std::move(message)),
          inter_send_delay_(inter_send_delay_s), delays_(delays),
          node_id_(std::move(node_id)), next_time_(start_time) {
        cfg_.validate();
    }

    TxState state() const { return state_; }
    int sent_count() const { return sent_count_; }
    double next_time() const { return next_time_; }
    const std::string& message() const { return message_; }

    TxStepResult step(double now) {
        if (now + 1e-12 < next_time_)
            throw DomainError("TxNode::step called before the scheduled transition");
        TxStepResult result;
        switch (state_) {
        case TxState::Init:
            state_ = TxState::Building;
            next_time_ = now + delays_.build_s;
            break;
        case TxState::Building:
            try {
                SymbolBlock block = encode_frame(message_, cfg_);
                const double toa =
                    time_on_air(cfg_, static_cast<int>(message_.size()));
                result.transmission = std::move(block);
                result.events.push_back({now, node_id_, EventKind::TxStart, message_});
                state_ = TxState::Transmitting;
                pending_tx_end_ = now + toa;
                next_time_ = pending_tx_end_;
            } catch (const std::exception& e) {
                result.events.push_back({now, node_id_, EventKind::TxEncodeFail, e.what()});
                state_ = TxState::Waiting;
                next_time_ = now + inter_send_delay_;
            }
            break;
        case TxState::Transmitting:
            result.events.push_back({now, node_id_, EventKind::TxEnd, message_});
            ++sent_count_;
            state_ = TxState::Waiting;
            next_time_ = now + inter_send_delay_;
            break;
        case TxState::Waiting:
            state_ = TxState::Building;
            next_time_ = now + delays_.build_s;
            break;
        }
        return result;
    }

private:
    RadioConfig cfg_;
    std::string message_;
    double inter_send_delay_;
    NodeDelays delays_;
    std::string node_id_;
    TxState state_ = TxState::Init;
    int sent_count_ = 0;
    double next_time_;
    double pending_tx_end_ = 0.0;
};

// ---------------------------------------------------------------------------
// Receiver
// ---------------------------------------------------------------------------

enum class RxState { Init, Listening, Decoding, Displaying, Uploading };

struct RxArrival {
    SymbolBlock symbols;
    double snr_db = kNoNoiseSnrDb;
};

struct RxStats {
    int detected = 0;
    int decoded_ok = 0;
    int header_failures = 0;
    int fec_failures = 0;
    int crc_failures = 0;
    int lcd_updates = 0;
    int uploads_started = 0;
};

// Stays in listening mode; a delivered frame walks Decoding -> Displaying ->
// Uploading and the machine is back in Listening when step() returns.  The
// LCD only changes for frames whose checks all passed; uploads are
// fire-and-forget (the UploadDone event models completion of the transfer).
class RxNode {
public:
    explicit RxNode(RadioConfig cfg, NodeDelays delays = {}, std::string node_id = "rx")
        : cfg_(std::move(cfg)), delays_(delays), node_id_(std::move(node_id)) {
        cfg_.validate();
        state_ = RxState::Listening;
    }

    RxState state() const { return state_; }
    const RxStats& stats() const { return stats_; }
    const LcdFrame& lcd() const { return lcd_; }
    const std::optional<std::string>& last_message() const { return last_message_; }

    std::vector<NodeEvent> step(const std::optional<RxArrival>& arrival, double now) {
        std::vector<NodeEvent> events;
        if (!arrival) return events; // idle listen
        ++stats_.detected;
        events.push_back({now, node_id_, EventKind::RxDetect, ""});

        const FrameDecodeResult decoded = decode_frame(arrival->symbols, cfg_);
        const double t_decoded = now + delays_.decode_s;
        if (!decoded.ok()) {
            switch (decoded.status) {
            case FrameStatus::HeaderCorrupt: ++stats_.header_failures; break;
            case FrameStatus::FecFailure: ++stats_.fec_failures; break;
            case FrameStatus::CrcMismatch: ++stats_.crc_failures; break;
            case FrameStatus::Ok: break;
            }
            events.push_back({t_decoded, node_id_, EventKind::RxDecodeFail,
                              to_string(decoded.status)});
            state_ = RxState::Listening;
            return events;
        }

        ++stats_.decoded_ok;
        events.push_back({t_decoded, node_id_, EventKind::RxDecodeOk, decoded.text});
        last_message_ = decoded.text;
        lcd_ = render_lcd(decoded.text);

        const double t_displayed = t_decoded + delays_.display_s;
        events.push_back({t_displayed, node_id_, EventKind::LcdUpdate, decoded.text});
        ++stats_.lcd_updates;

        events.push_back({t_displayed, node_id_, EventKind::UploadStart, decoded.text});
        ++stats_.uploads_started;
        events.push_back({t_displayed + delays_.upload_s, node_id_, EventKind::UploadDone,
                          decoded.text});

        state_ = RxState::Listening;
        return events;
    }

private:
    RadioConfig cfg_;
    NodeDelays delays_;
    std::string node_id_;
    RxState state_ = RxState::Init;
    RxStats stats_;
    LcdFrame lcd_;
    std::optional<std::string> last_message_;
};

// ---------------------------------------------------------------------------
// Latency accounting
// ---------------------------------------------------------------------------

enum class LatencyEndpoint { LcdUpdate, UploadDone };

// End-to-end latency of one packet, measured from message origination.
// TxStart trails origination by the build delay, so the result is
//   (endpoint - TxStart) + build_s
//     = build + ToA + decode + display [+ upload]
inline double end_to_end_latency(const NodeEvent& tx_start, const NodeEvent& endpoint_event,
                                 const NodeDelays& delays,
                                 LatencyEndpoint endpoint = LatencyEndpoint::UploadDone) {
    if (tx_start.kind != EventKind::TxStart)
        throw MissingEvent("end_to_end_latency: first event must be TxStart");
    const EventKind want = endpoint == LatencyEndpoint::LcdUpdate ? EventKind::LcdUpdate
                                                                  : EventKind::UploadDone;
    if (endpoint_event.kind != want)
        throw MissingEvent(std::string("end_to_end_latency: endpoint event must be ") +
                           to_string(want));
    const double dt = endpoint_event.timestamp - tx_start.timestamp;
    if (dt < 0)
        throw MissingEvent("end_to_end_latency: endpoint precedes TxStart");
    return dt + delays.build_s;
}

} // namespace chirplink
