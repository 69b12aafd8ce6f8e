#include <doctest.h>

#include <fstream>
#include <random>

#include "rulemine/csv.hpp"
#include "support/synth.hpp"
#include "support/temp_dir.hpp"

using namespace rulemine;

TEST_CASE("doubles survive the text round trip bit for bit") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> wide(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double v = wide(rng);
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-0.0) == "-0");
    CHECK(parse_double("1e-3") == 1e-3);
    CHECK_THROWS(parse_double("1.2x"));
    CHECK_THROWS(parse_double(""));
    CHECK_THROWS(parse_u64("-3"));
    CHECK(parse_u64("18446744073709551615") == 18446744073709551615ull);
}

TEST_CASE("field escaping quotes exactly when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("with\nnewline") == "\"with\nnewline\"");
    CHECK(csv_escape("") == "");
}

TEST_CASE("line splitting handles quoting and rejects malformed rows") {
    CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_csv_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(split_csv_line("a,\"x\"\"y\",d") == std::vector<std::string>{"a", "x\"y", "d"});
    CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
    CHECK(split_csv_line("a,b\r") == std::vector<std::string>{"a", "b"});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
    CHECK_THROWS(split_csv_line("a,\"unterminated"));
    CHECK_THROWS(split_csv_line("a,\"b\"x,c"));
}

TEST_CASE("rule records round-trip through the rules file") {
    testsup::TempDir tmp;
    std::vector<RuleRecord> records;
    RuleRecord one;
    one.name = "r_0(2)+";
    one.feature_names = {"X[1]", "X[7]"};
    one.bmins = {3, 0};
    one.bmaxs = {4, 0};
    one.cov = 0.0729;
    one.pred = 0.0120;
    one.crit_mean = 0.0017;
    one.crit_min = -0.0310;
    one.crit_max = 0.0372;
    one.pvalue = 0.0081;
    RuleRecord two;
    two.name = "r_1(1)-";
    two.feature_names = {"X[2]"};
    two.bmins = {0};
    two.bmaxs = {1};
    two.cov = 0.2;
    two.pred = -0.054;
    two.crit_mean = -0.004;
    two.crit_min = -0.09;
    two.crit_max = 0.02;
    two.pvalue = 0.0003;
    records.push_back(one);
    records.push_back(two);

    const auto path = tmp.file("rules.csv");
    write_rules_csv(path, records);

    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,pvalue");
    std::getline(in, row);
    // multi-name lists carry commas, so those cells arrive quoted
    CHECK(row.find("\"['X[1]', 'X[7]']\"") != std::string::npos);
    CHECK(row.find("\"[3, 0]\"") != std::string::npos);

    const auto back = read_rules_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == one.name);
    CHECK(back[0].feature_names == one.feature_names);
    CHECK(back[0].bmins == one.bmins);
    CHECK(back[0].bmaxs == one.bmaxs);
    CHECK(back[0].cov == one.cov);
    CHECK(back[0].pred == one.pred);
    CHECK(back[0].crit_mean == one.crit_mean);
    CHECK(back[0].crit_min == one.crit_min);
    CHECK(back[0].crit_max == one.crit_max);
    CHECK(back[0].pvalue == one.pvalue);
    CHECK(back[1].feature_names == two.feature_names);
    CHECK(back[1].pred == two.pred);
}

TEST_CASE("rule file rejections carry the line number") {
    testsup::TempDir tmp;
    const auto path = tmp.file("bad.csv");
    SUBCASE("wrong header") {
        std::ofstream(path) << "name,names\nr_0(1)+,['a']\n";
        CHECK_THROWS(read_rules_csv(path));
    }
    SUBCASE("wrong field count") {
        std::ofstream(path) << "name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,"
                               "pvalue\nr_0(1)+,['a'],[0],[1],0.5\n";
        CHECK_THROWS_WITH_AS(read_rules_csv(path), doctest::Contains(":2"),
                             std::runtime_error);
    }
    SUBCASE("malformed name list") {
        std::ofstream(path) << "name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,"
                               "pvalue\nr_0(1)+,[a],[0],[1],0.5,0.1,0.1,0.0,0.2,0.01\n";
        CHECK_THROWS(read_rules_csv(path));
    }
    SUBCASE("list arity mismatch") {
        std::ofstream(path) << "name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,"
                               "pvalue\nr_0(1)+,['a'],\"[0, 1]\",[1],0.5,0.1,0.1,0.0,0.2,0.01\n";
        CHECK_THROWS(read_rules_csv(path));
    }
}

TEST_CASE("records translate back into conditions by feature name") {
    const std::vector<std::string> names{"alpha", "beta", "gamma"};
    RuleRecord rec;
    rec.feature_names = {"gamma", "alpha"};  // stored order need not be sorted
    rec.bmins = {1, 0};
    rec.bmaxs = {2, 0};
    const Condition cond = record_condition(rec, names);
    CHECK(cond.features == std::vector<std::uint32_t>{0, 2});
    CHECK(cond.bmins == std::vector<std::uint8_t>{0, 1});
    CHECK(cond.bmaxs == std::vector<std::uint8_t>{0, 2});

    RuleRecord unknown = rec;
    unknown.feature_names = {"delta"};
    unknown.bmins = {0};
    unknown.bmaxs = {0};
    CHECK_THROWS(record_condition(unknown, names));
    RuleRecord repeated = rec;
    repeated.feature_names = {"alpha", "alpha"};
    CHECK_THROWS(record_condition(repeated, names));
}

TEST_CASE("rules serialize from fitted form with ordinal names") {
    Rule r;
    r.condition = {{0, 2}, {1, 0}, {2, 1}};
    r.prediction = -0.02;
    r.coverage = 0.25;
    r.criterion_seq = {0.1, -0.3, 0.5};
    r.pvalue = 0.04;
    const std::vector<std::string> names{"a", "b", "c"};
    const RuleRecord rec = to_record(r, 4, names);
    CHECK(rec.name == "r_4(2)-");
    CHECK(rec.feature_names == std::vector<std::string>{"a", "c"});
    CHECK(rec.bmins == std::vector<std::uint8_t>{1, 0});
    CHECK(rec.bmaxs == std::vector<std::uint8_t>{2, 1});
    CHECK(rec.cov == 0.25);
    CHECK(rec.pred == -0.02);
    CHECK(rec.crit_mean == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rec.crit_min == -0.3);
    CHECK(rec.crit_max == 0.5);
    CHECK(rec.pvalue == 0.04);
}

TEST_CASE("prediction files keep empty cells for missing rows") {
    testsup::TempDir tmp;
    PredictionPanel panel;
    panel.index = testsup::make_index(2, 2);
    panel.values = {0.5, 0.0, -0.25, 0.0};
    panel.has = {1, 0, 1, 0};
    const auto path = tmp.file("preds.csv");
    write_predictions_csv(path, panel);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "Date,Stock,prediction");
    std::getline(in, line);
    CHECK(line == "2020-01-01,S00,0.5");
    std::getline(in, line);
    CHECK(line == "2020-01-02,S00,");

    const auto back = read_predictions_csv(path);
    CHECK(back.index.entries == panel.index.entries);
    CHECK(back.has == panel.has);
    CHECK(back.values[0] == 0.5);
    CHECK(back.values[2] == -0.25);
}

TEST_CASE("holdings and return series files match their documented shapes") {
    testsup::TempDir tmp;
    const std::vector<Portfolio> folios{{{2020, 1, 1}, {"S01", "S00"}}, {{2020, 2, 3}, {}}};
    write_holdings_csv(tmp.file("hold.csv"), folios);
    std::ifstream hold(tmp.file("hold.csv"));
    std::string line;
    std::getline(hold, line);
    CHECK(line == "rebalance_date,stock");
    std::getline(hold, line);
    CHECK(line == "2020-01-01,S01");
    std::getline(hold, line);
    CHECK(line == "2020-01-01,S00");
    CHECK(!std::getline(hold, line));  // the empty month writes nothing

    ReturnSeries series;
    series.dates = {{2020, 1, 1}, {2020, 1, 2}};
    series.values = {0.01, 0.025};
    write_returns_csv(tmp.file("ret.csv"), series);
    std::ifstream ret(tmp.file("ret.csv"));
    std::getline(ret, line);
    CHECK(line == "Date,cumulative_return");
    std::getline(ret, line);
    CHECK(line == "2020-01-01,0.01");
    std::getline(ret, line);
    CHECK(line == "2020-01-02,0.025");
}

TEST_CASE("bin matrices round-trip with range validation") {
    testsup::TempDir tmp;
    const auto dd = testsup::make_dd(3, 2, 2, 4, 51);
    const std::vector<std::string> names{"f1", "f2"};
    const auto path = tmp.file("bins.csv");
    write_bins_csv(path, dd, names);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "Date,Stock,f1,f2");

    const BinsFile back = read_bins_csv(path, 4);
    CHECK(back.feature_names == names);
    CHECK(back.dd.bin_count == 4);
    CHECK(back.dd.index.entries == dd.index.entries);
    CHECK(back.dd.bins == dd.bins);

    // a bin at or above the declared count is rejected
    CHECK_THROWS(read_bins_csv(path, 2));
}
