#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "chirplink/errors.hpp"

namespace chirplink {

// ---------------------------------------------------------------------------
// Cloud-dashboard upload leg
//
// The wire protocol mimics the common IoT dashboard convention: a form POST
// to /update carrying api_key and field1..field8, answered with the new entry
// id as plain text, or "0" when the update is rejected (bad key, or posting
// faster than the channel's minimum interval).
// ---------------------------------------------------------------------------

struct UploadOutcome {
    bool accepted = false;
    long entry_id = 0;
    std::string error;
};

class TelemetryClient {
public:
    TelemetryClient(std::string endpoint, std::string write_key)
        : endpoint_(std::move(endpoint)), write_key_(std::move(write_key)) {
        if (endpoint_.empty()) throw ConfigError("TelemetryClient: empty endpoint");
    }

    // Reads TELEMETRY_ENDPOINT and TELEMETRY_WRITE_KEY; empty when the
    // endpoint variable is unset.
    static std::optional<TelemetryClient> from_env() {
        const char* endpoint = std::getenv("TELEMETRY_ENDPOINT");
        if (!endpoint || !*endpoint) return std::nullopt;
        const char* key = std::getenv("TELEMETRY_WRITE_KEY");
        return TelemetryClient(endpoint, key ? key : "");
    }

    const std::string& endpoint() const { return endpoint_; }

    // field1 carries the message; extra fields (field2=rssi and so on) pass
    // through untouched.  Throws TransportError when the server cannot be
    // reached; a reachable server that refuses the update yields
    // accepted=false instead.
    UploadOutcome upload(const std::string& message,
                         const std::map<std::string, std::string>& extra_fields = {}) const {
        httplib::Client cli(endpoint_);
        cli.set_connection_timeout(2, 0);
        cli.set_read_timeout(5, 0);

        httplib::Params params;
        params.emplace("api_key", write_key_);
        params.emplace("field1", message);
        for (const auto& [k, v] : extra_fields) params.emplace(k, v);

        auto res = cli.Post("/update", params);
        if (!res)
            throw TransportError("telemetry upload to " + endpoint_ + " failed: " +
                                 httplib::to_string(res.error()));
        UploadOutcome out;
        if (res->status != 200) {
            out.error = "http status " + std::to_string(res->status);
            return out;
        }
        try {
            out.entry_id = std::stol(res->body);
        } catch (const std::exception&) {
            out.error = "unparseable entry id '" + res->body + "'";
            return out;
        }
        out.accepted = out.entry_id > 0;
        if (!out.accepted) out.error = "update rejected";
        return out;
    }

private:
    std::string endpoint_;
    std::string write_key_;
};

// In-process stand-in for the dashboard service, for tests and the offline
// demo.  Binds 127.0.0.1 on an ephemeral port.  Accepted entries are
// readable both through entries() and through GET /channel/feed.json.
class MockTelemetryServer {
public:
    struct Entry {
        long entry_id = 0;
        std::string created_at;
        std::map<std::string, std::string> fields;
    };

    explicit MockTelemetryServer(std::string write_key, double min_interval_s = 0.0)
        : write_key_(std::move(write_key)), min_interval_s_(min_interval_s) {
        server_.Post("/update", [this](const httplib::Request& req, httplib::Response& res) {
            res.set_content(std::to_string(handle_update(req)), "text/plain");
        });
        server_.Get("/channel/feed.json",
                    [this](const httplib::Request&, httplib::Response& res) {
                        res.set_content(feed_json(), "application/json");
                    });
    }

    ~MockTelemetryServer() { stop(); }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw TransportError("MockTelemetryServer: bind failed");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::vector<Entry> entries() const {
        std::lock_guard lock(mutex_);
        return entries_;
    }

    int rejected_count() const { return rejected_.load(); }

    std::string feed_json() const {
        std::lock_guard lock(mutex_);
        nlohmann::json feeds = nlohmann::json::array();
        for (const auto& e : entries_) {
            nlohmann::json item;
            item["entry_id"] = e.entry_id;
            item["created_at"] = e.created_at;
            for (const auto& [k, v] : e.fields) item[k] = v;
            feeds.push_back(item);
        }
        nlohmann::json j;
        j["channel"] = {{"id", 1}, {"name", "chirplink"}};
        j["feeds"] = feeds;
        return j.dump();
    }

private:
    long handle_update(const httplib::Request& req) {
        const auto key = req.get_param_value("api_key");
        if (key != write_key_) {
            ++rejected_;
            return 0;
        }
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        if (min_interval_s_ > 0.0 && last_accept_) {
            const std::chrono::duration<double> gap = now - *last_accept_;
            if (gap.count() < min_interval_s_) {
                ++rejected_;
                return 0;
            }
        }
        Entry e;
        e.entry_id = static_cast<long>(entries_.size()) + 1;
        e.created_at = iso_timestamp();
        for (const auto& [name, value] : req.params)
            if (name.rfind("field", 0) == 0) e.fields[name] = value;
        entries_.push_back(e);
        last_accept_ = now;
        return entries_.back().entry_id;
    }

    static std::string iso_timestamp() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm_utc{};
        gmtime_r(&t, &tm_utc);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        return buf;
    }

    std::string write_key_;
    double min_interval_s_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
    std::optional<std::chrono::steady_clock::time_point> last_accept_;
    std::atomic<int> rejected_{0};
};

} // namespace chirplink
