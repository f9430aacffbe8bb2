#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracefeed/synth.hpp"
#include "tracefeed/time_util.hpp"

// Generates a synthetic fixture (GPS stream + terminals + stops) with its
// ground truth, in the exact formats the pipeline ingests.
int main(int argc, char** argv) {
    CLI::App app{"tracefeed-synth: synthetic GPS fixture generator with ground truth"};

    std::string out_dir = "fixture";
    int devices = 2;
    int trips_per_device = 4;
    int stops = 12;
    double spacing_m = 600.0;
    std::int64_t interval_s = 5;
    double dwell_s = 30.0;
    double speed_kmh = 40.0;
    double jitter_m = 0.0;
    std::uint64_t seed = 1;
    std::string start_time = "2024-03-04T06:00:00Z";

    app.add_option("--out", out_dir, "output directory");
    app.add_option("--devices", devices, "vehicle count")->check(CLI::PositiveNumber);
    app.add_option("--trips-per-device", trips_per_device, "alternating out/in runs each")
        ->check(CLI::PositiveNumber);
    app.add_option("--stops", stops, "stops per direction")->check(CLI::PositiveNumber);
    app.add_option("--spacing", spacing_m, "stop spacing, meters");
    app.add_option("--interval", interval_s, "sampling interval, seconds");
    app.add_option("--dwell", dwell_s, "dwell at each stop, seconds");
    app.add_option("--speed", speed_kmh, "cruise speed, km/h");
    app.add_option("--jitter", jitter_m, "positional noise standard deviation, meters");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--start", start_time, "first departure (ISO-8601)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto t0 = tracefeed::parse_iso8601(start_time);
        if (!t0) throw tracefeed::ScenarioError("--start is not ISO-8601: " + start_time);

        tracefeed::SyntheticScenario scenario;
        scenario.route = tracefeed::make_line_route(stops, spacing_m, 100.0);
        scenario.sampling_interval_s = interval_s;
        scenario.terminal_idle_s = std::max<std::int64_t>(60, interval_s);
        scenario.jitter_std_m = jitter_m;
        scenario.seed = seed;
        for (int d = 0; d < devices; ++d) {
            char name[16];
            std::snprintf(name, sizeof name, "bus-%03d", d + 1);
            // Stagger departures so the stream interleaves.
            auto plans = tracefeed::plan_shuttle(scenario.route, name, *t0 + d * 180,
                                                 trips_per_device, dwell_s, speed_kmh,
                                                 2 * scenario.terminal_idle_s + 120,
                                                 scenario.terminal_idle_s);
            for (auto& p : plans) scenario.trips.push_back(std::move(p));
        }

        auto [records, truth] = tracefeed::synthesize(scenario);

        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        tracefeed::write_gps_csv(records, dir / "gps.csv");
        tracefeed::write_terminals_csv(scenario.route, dir / "terminals.csv");
        tracefeed::write_stops_csv(scenario.route, dir / "stops.csv");

        nlohmann::ordered_json truth_doc = nlohmann::ordered_json::array();
        for (const auto& trip : truth.trips) {
            nlohmann::ordered_json t;
            t["device_id"] = trip.device_id;
            t["direction"] = tracefeed::to_string(trip.direction);
            t["t_start"] = trip.t_start;
            t["t_end"] = trip.t_end;
            nlohmann::ordered_json stop_list = nlohmann::ordered_json::array();
            for (const auto& s : trip.stops) {
                stop_list.push_back({{"stop_id", s.stop_id},
                                     {"sequence_index", s.sequence_index},
                                     {"arrival", s.arrival},
                                     {"departure", s.departure}});
            }
            t["stops"] = std::move(stop_list);
            truth_doc.push_back(std::move(t));
        }
        std::ofstream truth_out(dir / "ground_truth.json", std::ios::binary);
        truth_out << truth_doc.dump(2) << "\n";

        std::cerr << "wrote " << records.size() << " records for " << truth.trips.size()
                  << " trips under " << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
