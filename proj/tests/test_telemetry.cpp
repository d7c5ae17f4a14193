#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "chirplink/telemetry.hpp"

using namespace chirplink;

TEST_CASE("uploads are stored with gapless entry ids") {
    MockTelemetryServer server("SECRET");
    server.start();
    TelemetryClient client(server.endpoint(), "SECRET");

    for (int i = 1; i <= 5; ++i) {
        const UploadOutcome out =
            client.upload("msg " + std::to_string(i), {{"field2", "-19.4"}});
        REQUIRE(out.accepted);
        CHECK(out.entry_id == i);
    }

    const auto entries = server.entries();
    REQUIRE(entries.size() == 5);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(entries[i].entry_id == static_cast<long>(i) + 1);
        CHECK(entries[i].fields.at("field1") == "msg " + std::to_string(i + 1));
        CHECK(entries[i].fields.at("field2") == "-19.4");
        CHECK_FALSE(entries[i].created_at.empty());
    }
}

TEST_CASE("wrong write key is rejected with entry id zero") {
    MockTelemetryServer server("RIGHT");
    server.start();
    TelemetryClient client(server.endpoint(), "WRONG");
    const UploadOutcome out = client.upload("hello");
    CHECK_FALSE(out.accepted);
    CHECK(out.entry_id == 0);
    CHECK(server.entries().empty());
    CHECK(server.rejected_count() == 1);
}

TEST_CASE("rate limiting rejects back-to-back updates") {
    MockTelemetryServer server("KEY", 30.0);
    server.start();
    TelemetryClient client(server.endpoint(), "KEY");
    CHECK(client.upload("first").accepted);
    const UploadOutcome second = client.upload("second");
    CHECK_FALSE(second.accepted);
    CHECK(server.entries().size() == 1);
}

TEST_CASE("feed endpoint lists entries as json") {
    MockTelemetryServer server("KEY");
    server.start();
    TelemetryClient client(server.endpoint(), "KEY");
    client.upload("HELLO LORA 0001!");

    httplib::Client http(server.endpoint());
    auto res = http.Get("/channel/feed.json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const auto feed = nlohmann::json::parse(res->body);
    REQUIRE(feed["feeds"].size() == 1);
    CHECK(feed["feeds"][0]["entry_id"] == 1);
    CHECK(feed["feeds"][0]["field1"] == "HELLO LORA 0001!");
    CHECK(feed["channel"]["name"] == "chirplink");
}

TEST_CASE("unreachable endpoints raise a transport error") {
    TelemetryClient client("http://127.0.0.1:9", "KEY"); // discard port, nothing listens
    CHECK_THROWS_AS(client.upload("lost"), TransportError);
}

TEST_CASE("client configuration comes from the environment") {
    unsetenv("TELEMETRY_ENDPOINT");
    unsetenv("TELEMETRY_WRITE_KEY");
    CHECK_FALSE(TelemetryClient::from_env().has_value());

    setenv("TELEMETRY_ENDPOINT", "http://127.0.0.1:8123", 1);
    setenv("TELEMETRY_WRITE_KEY", "ENVKEY", 1);
    auto client = TelemetryClient::from_env();
    REQUIRE(client.has_value());
    CHECK(client->endpoint() == "http://127.0.0.1:8123");
    unsetenv("TELEMETRY_ENDPOINT");
    unsetenv("TELEMETRY_WRITE_KEY");
}
