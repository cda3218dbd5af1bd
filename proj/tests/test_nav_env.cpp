#include <doctest.h>

#include <cmath>
#include <map>

#include "xrl/nav.hpp"
#include "xrl/rng.hpp"

using namespace xrl;
using namespace xrl::nav;

TEST_CASE("deterministic transitions follow the room layout") {
    NavEnv env(0.0);
    Rng rng(1);

    SUBCASE("interior moves") {
        auto out = env.step(0, kLeft, rng);
        CHECK(out.next_state == StateId::index(1));
        CHECK(out.reward == 0.0);
        CHECK(out.terminal_kind == TerminalKind::none);

        out = env.step(1, kRight, rng);
        CHECK(out.next_state == StateId::index(3));

        out = env.step(0, kStay, rng);
        CHECK(out.next_state == StateId::index(0));
    }

    SUBCASE("entering room 5 completes the task with reward +1") {
        auto out = env.step(3, kRight, rng);
        CHECK(out.next_state.is_goal());
        CHECK(out.reward == 1.0);
        CHECK(out.terminal_kind == TerminalKind::goal);

        out = env.step(4, kLeft, rng);
        CHECK(out.next_state.is_goal());
        CHECK(out.reward == 1.0);
    }

    SUBCASE("leaving the level is absorbing failure with reward -1") {
        auto out = env.step(1, kLeft, rng);
        CHECK(out.next_state.is_aversive());
        CHECK(out.reward == -1.0);
        CHECK(out.terminal_kind == TerminalKind::aversive);
    }

    SUBCASE("each intermediate room has exactly one aversive exit") {
        for (int room = 1; room <= 4; ++room) {
            int aversive = 0;
            for (ActionId a = 0; a < kActionCount; ++a)
                aversive += intended_state(room, a).is_aversive();
            CHECK(aversive == 1);
        }
        for (ActionId a = 0; a < kActionCount; ++a) {
            CHECK_FALSE(intended_state(0, a).is_terminal());
            CHECK(intended_state(5, a).is_goal());
        }
    }

    SUBCASE("sigma=0 transitions are pure functions of state and action") {
        for (int room = 0; room < 5; ++room)
            for (ActionId a = 0; a < kActionCount; ++a) {
                const auto first = env.step(room, a, rng);
                for (int rep = 0; rep < 5; ++rep) {
                    const auto again = env.step(room, a, rng);
                    CHECK(again.next_state == first.next_state);
                    CHECK(again.reward == first.reward);
                }
            }
    }

    SUBCASE("bad inputs abort") {
        CHECK_THROWS_AS(env.step(-1, kLeft, rng), std::out_of_range);
        CHECK_THROWS_AS(env.step(6, kLeft, rng), std::out_of_range);
        CHECK_THROWS_AS(env.step(0, 3, rng), std::out_of_range);
    }
}

TEST_CASE("sigma-mixture outcome distribution") {
    SUBCASE("sums to one with support on intended plus other-action outcomes") {
        for (double sigma : {0.0, 0.1, 0.5, 1.0})
            for (int room = 0; room < 5; ++room)
                for (ActionId a = 0; a < kActionCount; ++a) {
                    const auto dist = outcome_distribution(room, a, sigma);
                    double total = 0.0;
                    for (const auto& [state, p] : dist) {
                        total += p;
                        bool in_support = false;
                        for (ActionId other = 0; other < kActionCount; ++other)
                            in_support = in_support || intended_state(room, other) == state;
                        CHECK(in_support);
                    }
                    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
                }
    }

    SUBCASE("fully random action from s0 going left splits between s0 and s2") {
        NavEnv env(1.0);
        Rng rng(42);
        std::map<int, int> counts;
        const int n = 20000;
        for (int i = 0; i < n; ++i) counts[env.step(0, kLeft, rng).next_state.index()] += 1;
        CHECK(counts.size() == 2);
        CHECK(static_cast<double>(counts[0]) / n == doctest::Approx(0.5).epsilon(0.04));
        CHECK(static_cast<double>(counts[2]) / n == doctest::Approx(0.5).epsilon(0.04));
    }

    SUBCASE("sampled frequencies match the stated mixture") {
        NavEnv env(0.3);
        Rng rng(43);
        const int n = 30000;
        std::map<int, int> counts;  // -1 goal, -2 aversive, else room
        for (int i = 0; i < n; ++i) {
            const auto out = env.step(1, kRight, rng);
            const int key = out.next_state.is_goal() ? -1 : out.next_state.is_aversive() ? -2
                                                      : out.next_state.index();
            counts[key] += 1;
        }
        // intended s3 with 0.7, aversive (left exit) 0.15, stay 0.15
        CHECK(static_cast<double>(counts[3]) / n == doctest::Approx(0.70).epsilon(0.03));
        CHECK(static_cast<double>(counts[-2]) / n == doctest::Approx(0.15).epsilon(0.08));
        CHECK(static_cast<double>(counts[1]) / n == doctest::Approx(0.15).epsilon(0.08));
    }
}

TEST_CASE("exact success probabilities under a fixed policy") {
    SUBCASE("deterministic shortest-path policy succeeds on-path with certainty") {
        const auto table = exact_success_probability(greedy_shortest_path_policy(), 0.0);
        CHECK(table.at(0, kRight) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(table.at(2, kLeft) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(table.at(4, kLeft) == doctest::Approx(1.0).epsilon(1e-10));
        // the left path is just as good under this policy
        CHECK(table.at(0, kLeft) == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("aversive exits have zero success probability under any policy") {
        for (const auto& policy : {greedy_shortest_path_policy(), uniform_policy()}) {
            const auto table = exact_success_probability(policy, 0.0);
            CHECK(table.at(1, kLeft) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(table.at(2, kRight) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(table.at(3, kLeft) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(table.at(4, kRight) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }

    SUBCASE("uniform policy solution matches the hand-solved absorption system") {
        // By symmetry u3 = u4 = 1/2 and u0 = u1 = u2 = 1/4.
        const auto t = exact_success_probability(uniform_policy(), 0.0);
        CHECK(t.at(0, kLeft) == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(t.at(0, kRight) == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(t.at(0, kStay) == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(t.at(1, kRight) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(t.at(1, kStay) == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(t.at(3, kRight) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(t.at(3, kStay) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(t.at(4, kStay) == doctest::Approx(0.5).epsilon(1e-10));
    }

    SUBCASE("values stay within [0,1] across sigma") {
        for (double sigma : {0.0, 0.05, 0.2, 0.7}) {
            const auto t = exact_success_probability(uniform_policy(), sigma);
            for (int s = 0; s < kStateCount; ++s)
                for (ActionId a = 0; a < kActionCount; ++a) {
                    CHECK(t.at(s, a) >= -1e-12);
                    CHECK(t.at(s, a) <= 1.0 + 1e-12);
                }
        }
    }

    SUBCASE("policy-followed pairs degrade monotonically as sigma grows") {
        const auto policy = greedy_shortest_path_policy();
        const ActionId chosen[5] = {kRight, kRight, kLeft, kRight, kLeft};
        double prev[5] = {2, 2, 2, 2, 2};
        for (double sigma : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
            const auto t = exact_success_probability(policy, sigma);
            for (int s = 0; s < 5; ++s) {
                CHECK(t.at(s, chosen[s]) <= prev[s] + 1e-12);
                prev[s] = t.at(s, chosen[s]);
            }
        }
    }

    SUBCASE("linear solve agrees with Monte-Carlo rollouts") {
        const auto policy = greedy_shortest_path_policy();
        const double sigma = 0.1;
        const auto t = exact_success_probability(policy, sigma);

        NavEnv env(sigma);
        Rng rng(99);
        const int episodes = 1000000;
        int successes = 0;
        for (int i = 0; i < episodes; ++i) {
            // execute a_R from s0, then follow the policy
            int room = 0;
            ActionId a = kRight;
            for (int step = 0; step < 500; ++step) {
                const auto out = env.step(room, a, rng);
                if (out.terminal_kind == TerminalKind::goal) {
                    ++successes;
                    break;
                }
                if (out.terminal_kind == TerminalKind::aversive) break;
                room = out.next_state.index();
                for (ActionId cand = 0; cand < kActionCount; ++cand)
                    if (policy[room][cand] == 1.0) a = cand;
            }
        }
        const double estimate = static_cast<double>(successes) / episodes;
        CHECK(estimate == doctest::Approx(t.at(0, kRight)).epsilon(0.005 / t.at(0, kRight)));
    }

    SUBCASE("malformed policies are rejected") {
        NavPolicy bad = uniform_policy();
        bad[2] = {0.5, 0.5, 0.5};
        CHECK_THROWS_AS(exact_success_probability(bad, 0.0), std::invalid_argument);
    }
}

TEST_CASE("transition table exports as JSON") {
    const std::string json = transition_table_json();
    CHECK(json.find("\"s0\":{\"a_L\":\"s1\",\"a_R\":\"s2\",\"a_S\":\"s0\"}") != std::string::npos);
    CHECK(json.find("\"s1\":{\"a_L\":\"aversive\"") != std::string::npos);
    CHECK(json.find("\"s5\":{\"a_L\":\"goal\",\"a_R\":\"goal\",\"a_S\":\"goal\"}") != std::string::npos);
}
