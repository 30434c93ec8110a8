#include <orderbench/channel.hpp>
#include <orderbench/error.hpp>
#include <orderbench/external.hpp>
#include <orderbench/metrics.hpp>
#include <orderbench/protocol.hpp>

#include "cli/mock_endpoint.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <thread>

namespace orderbench {
namespace {

using namespace std::chrono_literals;

std::vector<ShuffledInstance> instances_of(const Corpus& corpus, std::uint64_t seed)
{
    std::vector<ShuffledInstance> out;
    for (const auto& doc : corpus.documents) {
        out.push_back(shuffle_document(doc, derive_seed(seed, doc.id, "shuffle"), doc.id));
    }
    return out;
}

// Accepts connections on a loopback port and serves each one on its own thread.
class Server {
public:
    explicit Server(std::function<void(LineChannel&)> session) : session_(std::move(session))
    {
        thread_ = std::jthread([this] {
            while (true) {
                std::shared_ptr<LineChannel> channel = listener_.accept();
                if (stopping_) {
                    return;
                }
                sessions_.emplace_back([this, channel] {
                    try {
                        session_(*channel);
                    } catch (const Error&) {
                    }
                });
            }
        });
    }

    ~Server()
    {
        stopping_ = true;
        open_channel(uri()); // wakes the accept loop
        thread_.join();
    }

    std::string uri() const { return "tcp://127.0.0.1:" + std::to_string(listener_.port()); }

private:
    std::function<void(LineChannel&)> session_;
    TcpListener listener_{0};
    std::atomic<bool> stopping_ = false;
    std::vector<std::jthread> sessions_;
    std::jthread thread_;
};

void handshake(LineChannel& channel)
{
    auto line = channel.read_line(5s);
    ASSERT_TRUE(line);
    check_handshake_request(*line);
    channel.write_line(handshake_reply_line("test-endpoint"));
}

TEST(Protocol, HandshakeMessages)
{
    EXPECT_EQ(nlohmann::json::parse(handshake_request_line()), nlohmann::json({{"protocol", "order-bench/1"}}));
    EXPECT_NO_THROW(check_handshake_request(R"({"protocol":"order-bench/1"})"));
    EXPECT_THROW(check_handshake_request(R"({"protocol":"order-bench/2"})"), ProtocolError);
    EXPECT_THROW(check_handshake_request("hello"), ProtocolError);
    EXPECT_EQ(parse_handshake_reply(handshake_reply_line("bart")), "bart");
    EXPECT_THROW(parse_handshake_reply(R"({"protocol":"order-bench/1"})"), ProtocolError);
    EXPECT_THROW(parse_handshake_reply(error_line("nope")), ProtocolError);
}

TEST(Protocol, RequestRoundTrip)
{
    const auto inst = ShuffledInstance::make({"d1", {"A.", "B \"quoted\".", "C."}}, Permutation({2, 1, 3}), "d1");
    const auto input = encode_input(inst, MarkerMode::random(3));
    const auto request = make_request(inst, input);
    EXPECT_EQ(request.n, 3u);
    EXPECT_EQ(request.markers, input.marker_of_slot);
    const auto line = to_line(request);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(parse_request(line), request);
    const auto parsed = nlohmann::json::parse(line);
    EXPECT_EQ(parsed.at("text"), input.text);
    EXPECT_EQ(parsed.at("markers").size(), 3u);
}

TEST(Protocol, ReplyRoundTripAndErrors)
{
    const OrderReply reply{"x#r1", "2 1 3"};
    EXPECT_EQ(parse_reply(to_line(reply)), reply);
    EXPECT_EQ(nlohmann::json::parse(to_line(reply)), nlohmann::json({{"id", "x#r1"}, {"output", "2 1 3"}}));
    EXPECT_THROW(parse_reply(R"({"id":"x"})"), ProtocolError);
    EXPECT_THROW(parse_reply(R"({"id":1,"output":"1"})"), ProtocolError);
    EXPECT_THROW(parse_reply(error_line("boom")), ProtocolError);
    EXPECT_THROW(parse_request(R"({"id":"x","text":"t","n":2,"markers":[1]})"), ProtocolError);
    EXPECT_THROW(parse_request(R"({"id":"x","text":"t","n":-1,"markers":[]})"), ProtocolError);
    EXPECT_THROW(parse_request("[1,2]"), ProtocolError);
}

TEST(Protocol, TimeoutFromEnvironment)
{
    ::unsetenv("ORDER_BENCH_TIMEOUT_SECS");
    EXPECT_EQ(timeout_from_env(), 30s);
    ::setenv("ORDER_BENCH_TIMEOUT_SECS", "0.25", 1);
    EXPECT_EQ(timeout_from_env(), 250ms);
    ::setenv("ORDER_BENCH_TIMEOUT_SECS", "soon", 1);
    EXPECT_THROW(timeout_from_env(), UsageError);
    ::unsetenv("ORDER_BENCH_TIMEOUT_SECS");
}

TEST(MockEndpoint, SplitsEncodedText)
{
    const auto corpus = generate_synthetic(3, 4, 1);
    const auto inst = shuffle_document(corpus.documents[1], 5, corpus.documents[1].id);
    for (const auto& mode : {MarkerMode::sequential(), MarkerMode::random(2), MarkerMode::none()}) {
        const auto request = make_request(inst, encode_input(inst, mode));
        EXPECT_EQ(cli::split_encoded_text(request, corpus.documents[1].sentences), inst.shuffled);
    }
}

TEST(ExternalOrderer, GoldMockOverTcp)
{
    const auto corpus = generate_synthetic(40, 5, 2);
    const cli::MockEndpoint mock(corpus, cli::MockBehaviour::parse("gold"), 0, "gold-mock");
    Server server([&mock](LineChannel& c) { mock.serve(c); });
    const auto instances = instances_of(corpus, 1);
    std::vector<InstanceResult> results;
    {
        const ExternalOrderer external({.uri = server.uri(), .mode = MarkerMode::random(9)});
        const auto outcomes = external.order_batch(instances);
        EXPECT_EQ(external.endpoint_name(), "gold-mock");
        for (std::size_t k = 0; k < instances.size(); ++k) {
            ASSERT_TRUE(outcomes[k].prediction) << outcomes[k].error;
            EXPECT_FALSE(outcomes[k].prediction->repaired);
            results.push_back({instances[k].id, outcomes[k].prediction->y, instances[k].gold, 0});
        }
    }
    EXPECT_EQ(pmr(results), 1);
}

TEST(ExternalOrderer, OutOfOrderRepliesMatchedById)
{
    const auto corpus = generate_synthetic(6, 4, 3);
    const cli::MockEndpoint mock(corpus, cli::MockBehaviour::parse("gold"), 0);
    Server server([&mock](LineChannel& c) {
        handshake(c);
        std::vector<OrderRequest> requests;
        for (int k = 0; k < 6; ++k) {
            requests.push_back(parse_request(*c.read_line(5s)));
        }
        for (auto it = requests.rbegin(); it != requests.rend(); ++it) {
            c.write_line(to_line(mock.answer(*it)));
        }
    });
    const auto instances = instances_of(corpus, 4);
    const ExternalOrderer external({.uri = server.uri(), .pipeline_depth = 8});
    const auto outcomes = external.order_batch(instances);
    for (std::size_t k = 0; k < instances.size(); ++k) {
        ASSERT_TRUE(outcomes[k].prediction) << outcomes[k].error;
        EXPECT_EQ(outcomes[k].prediction->y, instances[k].gold);
    }
}

TEST(ExternalOrderer, RepairsInvalidReplies)
{
    Server server([](LineChannel& c) {
        handshake(c);
        const auto request = parse_request(*c.read_line(5s));
        c.write_line(to_line(OrderReply{request.id, "9 9"}));
    });
    const auto inst = ShuffledInstance::make({"d", {"a", "b", "c"}}, Permutation({3, 1, 2}), "d");
    const ExternalOrderer external({.uri = server.uri()});
    const auto prediction = external.order(inst);
    EXPECT_TRUE(prediction.repaired);
    EXPECT_EQ(prediction.y, Permutation({1, 2, 3}));
}

TEST(ExternalOrderer, UnreachableEndpointFailsEachInstance)
{
    std::uint16_t port = 0;
    {
        TcpListener probe(0);
        port = probe.port();
    }
    const auto corpus = generate_synthetic(3, 3, 4);
    const auto instances = instances_of(corpus, 1);
    const ExternalOrderer external({.uri = "tcp://127.0.0.1:" + std::to_string(port)});
    const auto outcomes = external.order_batch(instances);
    ASSERT_EQ(outcomes.size(), 3u);
    for (const auto& o : outcomes) {
        EXPECT_FALSE(o.prediction);
        EXPECT_FALSE(o.error.empty());
    }
    EXPECT_THROW(external.order(instances[0]), ProtocolError);
}

TEST(ExternalOrderer, SilentEndpointTimesOut)
{
    std::atomic<bool> done = false;
    Server server([&done](LineChannel& c) {
        handshake(c);
        while (!done) {
            c.read_line(50ms);
        }
    });
    const auto inst = ShuffledInstance::make({"d", {"a", "b"}}, Permutation({2, 1}), "d");
    const ExternalOrderer external({.uri = server.uri(), .timeout = 200ms});
    const auto start = std::chrono::steady_clock::now();
    const auto outcomes = external.order_batch(std::span(&inst, 1));
    EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
    ASSERT_FALSE(outcomes[0].prediction);
    EXPECT_NE(outcomes[0].error.find("no reply"), std::string::npos);
    done = true;
}

TEST(ExternalOrderer, RejectedHandshake)
{
    Server server([](LineChannel& c) {
        c.read_line(5s);
        c.write_line(error_line("wrong protocol"));
    });
    const auto inst = ShuffledInstance::make({"d", {"a", "b"}}, Permutation({2, 1}), "d");
    const ExternalOrderer external({.uri = server.uri()});
    const auto outcomes = external.order_batch(std::span(&inst, 1));
    ASSERT_FALSE(outcomes[0].prediction);
    EXPECT_NE(outcomes[0].error.find("wrong protocol"), std::string::npos);
}

TEST(ExternalOrderer, ConcurrentCallersGetOwnConnections)
{
    const auto corpus = generate_synthetic(64, 4, 5);
    const cli::MockEndpoint mock(corpus, cli::MockBehaviour::parse("gold"), 0);
    Server server([&mock](LineChannel& c) { mock.serve(c); });
    const auto instances = instances_of(corpus, 2);
    const ExternalOrderer external({.uri = server.uri(), .pipeline_depth = 4});
    std::vector<std::vector<Outcome>> outcomes(4);
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < 4; ++w) {
            workers.emplace_back([&, w] { outcomes[w] = external.order_batch(std::span(instances).subspan(w * 16, 16)); });
        }
    }
    for (std::size_t w = 0; w < 4; ++w) {
        for (std::size_t k = 0; k < 16; ++k) {
            ASSERT_TRUE(outcomes[w][k].prediction) << outcomes[w][k].error;
            EXPECT_EQ(outcomes[w][k].prediction->y, instances[w * 16 + k].gold);
        }
    }
}

TEST(ExternalOrderer, CliMockOverStdio)
{
    const auto dir = std::filesystem::temp_directory_path() / "orderbench-protocol-test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "gold.jsonl";
    const auto corpus = generate_synthetic(30, 5, 6);
    save_corpus(corpus, path);
    const auto instances = instances_of(corpus, 3);

    const ExternalOrderer gold(
        {.uri = std::string("stdio:") + ORDER_BENCH_CLI + " serve-mock --corpus " + path.string(),
         .mode = MarkerMode::none()});
    for (const auto& outcome : gold.order_batch(instances)) {
        ASSERT_TRUE(outcome.prediction) << outcome.error;
    }
    EXPECT_EQ(gold.order(instances[4]).y, instances[4].gold);

    const ExternalOrderer invalid(
        {.uri = std::string("stdio:") + ORDER_BENCH_CLI + " serve-mock --mode invalid --corpus " + path.string()});
    for (const auto& outcome : invalid.order_batch(instances)) {
        ASSERT_TRUE(outcome.prediction) << outcome.error;
        EXPECT_TRUE(outcome.prediction->repaired);
    }
    std::filesystem::remove_all(dir);
}

TEST(ExternalOrderer, EndpointThatExitsFailsCleanly)
{
    const auto inst = ShuffledInstance::make({"d", {"a", "b"}}, Permutation({2, 1}), "d");
    const ExternalOrderer external({.uri = "stdio:true"});
    const auto outcomes = external.order_batch(std::span(&inst, 1));
    ASSERT_FALSE(outcomes[0].prediction);
    EXPECT_THROW(open_channel("carrier-pigeon://home"), UsageError);
}

} // namespace
} // namespace orderbench
