#include "tracefeed/gtfs.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tracefeed/csv.hpp"
#include "tracefeed/time_util.hpp"

namespace tracefeed {

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failure on: " + path.string());
}

std::string service_id_for(const std::string& yyyymmdd) { return "svc_" + yyyymmdd; }

const std::vector<StopEvent>& events_for(const EventsByTrip& events, const std::string& trip_id) {
    static const std::vector<StopEvent> empty;
    const auto it = events.find(trip_id);
    return it == events.end() ? empty : it->second;
}

}  // namespace

GtfsManifest emit_static(const RouteDefinition& route, const std::vector<TripTrajectory>& trips,
                         const EventsByTrip& events, const std::filesystem::path& out_dir,
                         const PipelineConfig& config) {
    const std::int64_t offset = parse_utc_offset(config.timezone);
    std::filesystem::create_directories(out_dir);

    // Pre-write integrity: every referenced stop must exist on the route.
    std::unordered_set<std::string> known_stops;
    for (const auto& s : route.stops_outbound) known_stops.insert(s.stop_id);
    for (const auto& s : route.stops_inbound) known_stops.insert(s.stop_id);
    for (const auto& [trip_id, trip_events] : events) {
        for (const auto& e : trip_events) {
            if (!known_stops.count(e.stop_id))
                throw IntegrityError("stop event references unknown stop '" + e.stop_id + "'");
        }
    }

    GtfsManifest manifest;
    manifest.directory = out_dir;

    {
        std::ostringstream agency;
        agency << "agency_id,agency_name,agency_url,agency_timezone\n";
        agency << csv_escape(config.agency_id, ',') << ',' << csv_escape(config.agency_name, ',')
               << ',' << csv_escape(config.agency_url, ',') << ','
               << csv_escape(config.timezone, ',') << '\n';
        write_text(out_dir / "agency.txt", agency.str());
    }
    {
        std::ostringstream routes;
        routes << "route_id,agency_id,route_short_name,route_long_name,route_type\n";
        routes << csv_escape(route.route_id, ',') << ',' << csv_escape(config.agency_id, ',')
               << ',' << csv_escape(route.route_id, ',') << ','
               << csv_escape(route.terminal_a.name + " - " + route.terminal_b.name, ',')
               << ",3\n";
        write_text(out_dir / "routes.txt", routes.str());
    }
    {
        std::ostringstream stops;
        stops << "stop_id,stop_name,stop_lat,stop_lon\n";
        std::set<std::string> written;
        auto write_stop = [&](const StopPoint& s) {
            if (!written.insert(s.stop_id).second) return;
            stops << csv_escape(s.stop_id, ',') << ',' << csv_escape(s.name, ',') << ','
                  << format_double(s.latitude) << ',' << format_double(s.longitude) << '\n';
        };
        for (const auto& s : route.stops_outbound) write_stop(s);
        for (const auto& s : route.stops_inbound) write_stop(s);
        write_text(out_dir / "stops.txt", stops.str());
    }

    std::ostringstream trips_out;
    trips_out << "route_id,service_id,trip_id,direction_id\n";
    std::ostringstream stop_times;
    stop_times << "trip_id,arrival_time,departure_time,stop_id,stop_sequence,timepoint\n";
    std::set<std::string> service_dates;

    for (const TripTrajectory& trip : trips) {
        const std::string date = service_date_of(trip.start_time, offset);
        service_dates.insert(date);
        trips_out << csv_escape(route.route_id, ',') << ',' << service_id_for(date) << ','
                  << csv_escape(trip.trip_id, ',') << ','
                  << (trip.direction == Direction::outbound ? 0 : 1) << '\n';
        ++manifest.trip_rows;

        const EpochSeconds day_start = service_day_start(date, offset);
        for (const StopEvent& e : events_for(events, trip.trip_id)) {
            stop_times << csv_escape(trip.trip_id, ',') << ',';
            if (e.matched()) {
                stop_times << format_service_time(*e.arrival_time, day_start) << ','
                           << format_service_time(*e.departure_time, day_start) << ','
                           << csv_escape(e.stop_id, ',') << ',' << e.sequence_index << ",1\n";
            } else {
                stop_times << ",," << csv_escape(e.stop_id, ',') << ',' << e.sequence_index
                           << ",0\n";
            }
            ++manifest.stop_time_rows;
        }
    }
    write_text(out_dir / "trips.txt", trips_out.str());
    write_text(out_dir / "stop_times.txt", stop_times.str());

    {
        std::ostringstream calendar;
        calendar
            << "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,"
               "end_date\n";
        for (const auto& date : service_dates)
            calendar << service_id_for(date) << ",1,1,1,1,1,1,1," << date << ',' << date << '\n';
        write_text(out_dir / "calendar.txt", calendar.str());
    }

    manifest.files = {"agency.txt", "routes.txt",     "stops.txt",
                      "trips.txt",  "stop_times.txt", "calendar.txt"};
    validate_bundle(out_dir, config);
    return manifest;
}

namespace {

struct ParsedTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw IntegrityError("emitted table is missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

int parse_int_cell(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw IntegrityError(std::string("non-numeric ") + what + " '" + text +
                             "' in emitted table");
    }
}

ParsedTable parse_table(const std::filesystem::path& path) {
    const RawTable raw = read_table(path, ',');
    for (const auto& row : raw.rows) {
        if (row.size() != raw.header.size())
            throw IntegrityError("ragged row in emitted table " + path.string());
    }
    return ParsedTable{raw.header, raw.rows};
}

}  // namespace

void validate_bundle(const std::filesystem::path& dir, const PipelineConfig& config) {
    const std::int64_t offset = parse_utc_offset(config.timezone);

    const ParsedTable routes = parse_table(dir / "routes.txt");
    const ParsedTable stops = parse_table(dir / "stops.txt");
    const ParsedTable trips = parse_table(dir / "trips.txt");
    const ParsedTable stop_times = parse_table(dir / "stop_times.txt");
    const ParsedTable calendar = parse_table(dir / "calendar.txt");

    std::unordered_set<std::string> route_ids, stop_ids, service_ids;
    for (const auto& r : routes.rows) route_ids.insert(r[routes.column("route_id")]);
    for (const auto& r : stops.rows) stop_ids.insert(r[stops.column("stop_id")]);
    std::unordered_map<std::string, std::string> service_dates;
    {
        const std::size_t sid = calendar.column("service_id");
        const std::size_t start = calendar.column("start_date");
        for (const auto& r : calendar.rows) {
            service_ids.insert(r[sid]);
            service_dates[r[sid]] = r[start];
        }
    }

    std::unordered_map<std::string, std::string> trip_service;
    {
        const std::size_t tid = trips.column("trip_id");
        const std::size_t rid = trips.column("route_id");
        const std::size_t sid = trips.column("service_id");
        for (const auto& r : trips.rows) {
            if (!route_ids.count(r[rid]))
                throw IntegrityError("trips.txt references unknown route '" + r[rid] + "'");
            if (!service_ids.count(r[sid]))
                throw IntegrityError("trips.txt references unknown service '" + r[sid] + "'");
            if (!trip_service.emplace(r[tid], r[sid]).second)
                throw IntegrityError("duplicate trip_id '" + r[tid] + "' in trips.txt");
        }
    }

    const std::size_t tid = stop_times.column("trip_id");
    const std::size_t arr = stop_times.column("arrival_time");
    const std::size_t dep = stop_times.column("departure_time");
    const std::size_t sid = stop_times.column("stop_id");
    const std::size_t seq = stop_times.column("stop_sequence");

    std::unordered_set<std::string> seen_trips;
    std::string current_trip;
    int last_seq = 0;
    for (const auto& r : stop_times.rows) {
        if (!trip_service.count(r[tid]))
            throw IntegrityError("stop_times.txt references unknown trip '" + r[tid] + "'");
        if (!stop_ids.count(r[sid]))
            throw IntegrityError("stop_times.txt references unknown stop '" + r[sid] + "'");

        if (r[tid] != current_trip) {
            // Rows for one trip must be one contiguous block.
            if (!seen_trips.insert(r[tid]).second)
                throw IntegrityError("stop_times rows for trip '" + r[tid] +
                                     "' are not contiguous");
            current_trip = r[tid];
            last_seq = 0;
        }
        const int sequence = parse_int_cell(r[seq], "stop_sequence");
        if (sequence <= last_seq)
            throw IntegrityError("stop_sequence not strictly increasing in trip '" + r[tid] +
                                 "'");
        last_seq = sequence;

        const bool has_arr = !r[arr].empty();
        const bool has_dep = !r[dep].empty();
        if (has_arr != has_dep)
            throw IntegrityError("stop_times row has only one of arrival/departure in trip '" +
                                 r[tid] + "'");
        if (has_arr) {
            const EpochSeconds day_start =
                service_day_start(service_dates.at(trip_service.at(r[tid])), offset);
            const auto a = parse_service_time(r[arr], day_start);
            const auto d = parse_service_time(r[dep], day_start);
            if (!a || !d)
                throw IntegrityError("unparseable time in stop_times row of trip '" + r[tid] +
                                     "'");
            if (*a > *d)
                throw IntegrityError("arrival after departure in trip '" + r[tid] + "'");
        }
    }
}

std::vector<StopTimeRow> read_stop_times(const std::filesystem::path& dir,
                                         const PipelineConfig& config) {
    const std::int64_t offset = parse_utc_offset(config.timezone);
    const ParsedTable trips = parse_table(dir / "trips.txt");
    const ParsedTable calendar = parse_table(dir / "calendar.txt");
    const ParsedTable stop_times = parse_table(dir / "stop_times.txt");

    std::unordered_map<std::string, std::string> service_dates;
    for (const auto& r : calendar.rows)
        service_dates[r[calendar.column("service_id")]] = r[calendar.column("start_date")];
    std::unordered_map<std::string, EpochSeconds> trip_day_start;
    for (const auto& r : trips.rows) {
        const std::string& sid = r[trips.column("service_id")];
        trip_day_start[r[trips.column("trip_id")]] =
            service_day_start(service_dates.at(sid), offset);
    }

    const std::size_t tid = stop_times.column("trip_id");
    const std::size_t arr = stop_times.column("arrival_time");
    const std::size_t dep = stop_times.column("departure_time");
    const std::size_t sid = stop_times.column("stop_id");
    const std::size_t seq = stop_times.column("stop_sequence");
    const std::size_t tp = stop_times.column("timepoint");

    std::vector<StopTimeRow> rows;
    rows.reserve(stop_times.rows.size());
    for (const auto& r : stop_times.rows) {
        StopTimeRow row;
        row.trip_id = r[tid];
        row.stop_id = r[sid];
        row.stop_sequence = parse_int_cell(r[seq], "stop_sequence");
        row.timepoint = parse_int_cell(r[tp], "timepoint");
        const EpochSeconds day_start = trip_day_start.at(row.trip_id);
        if (!r[arr].empty()) row.arrival = parse_service_time(r[arr], day_start);
        if (!r[dep].empty()) row.departure = parse_service_time(r[dep], day_start);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t emit_trip_updates(const RouteDefinition& route,
                              const std::vector<TripTrajectory>& trips,
                              const EventsByTrip& events, const std::filesystem::path& out_path,
                              const PipelineConfig& config) {
    const std::int64_t offset = parse_utc_offset(config.timezone);
    std::ostringstream out;
    std::size_t count = 0;
    for (const TripTrajectory& trip : trips) {
        nlohmann::ordered_json entity;
        entity["id"] = trip.trip_id;
        nlohmann::ordered_json& update = entity["trip_update"];
        update["trip"] = {{"trip_id", trip.trip_id},
                          {"route_id", route.route_id},
                          {"direction_id", trip.direction == Direction::outbound ? 0 : 1},
                          {"start_date", service_date_of(trip.start_time, offset)}};
        update["vehicle"] = {{"id", trip.device_id}};
        nlohmann::ordered_json stop_updates = nlohmann::ordered_json::array();
        for (const StopEvent& e : events_for(events, trip.trip_id)) {
            if (!e.matched()) continue;
            nlohmann::ordered_json u;
            u["stop_sequence"] = e.sequence_index;
            u["stop_id"] = e.stop_id;
            u["arrival"] = {{"time", *e.arrival_time}};
            u["departure"] = {{"time", *e.departure_time}};
            u["scenario"] = to_string(e.scenario);
            u["match_distance_m"] = e.match_distance_m;
            stop_updates.push_back(std::move(u));
        }
        update["stop_time_update"] = std::move(stop_updates);
        out << entity.dump() << '\n';
        ++count;
    }
    write_text(out_path, out.str());
    return count;
}

std::vector<TripUpdateEntity> parse_trip_updates(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::vector<TripUpdateEntity> entities;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        const std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;

        const auto doc = nlohmann::json::parse(line);
        TripUpdateEntity entity;
        entity.trip_id = doc.at("id").get<std::string>();
        const auto& update = doc.at("trip_update");
        const auto& trip = update.at("trip");
        entity.route_id = trip.at("route_id").get<std::string>();
        entity.direction =
            trip.at("direction_id").get<int>() == 0 ? Direction::outbound : Direction::inbound;
        entity.start_date = trip.at("start_date").get<std::string>();
        entity.device_id = update.at("vehicle").at("id").get<std::string>();
        for (const auto& u : update.at("stop_time_update")) {
            StopEvent e;
            e.trip_id = entity.trip_id;
            e.stop_id = u.at("stop_id").get<std::string>();
            e.sequence_index = u.at("stop_sequence").get<int>();
            e.arrival_time = u.at("arrival").at("time").get<EpochSeconds>();
            e.departure_time = u.at("departure").at("time").get<EpochSeconds>();
            e.dwell_s = *e.departure_time - *e.arrival_time;
            const auto scenario = scenario_from_string(u.at("scenario").get<std::string>());
            if (!scenario)
                throw IntegrityError("unknown scenario tag in trip update entity '" +
                                     entity.trip_id + "'");
            e.scenario = *scenario;
            e.match_distance_m = u.at("match_distance_m").get<double>();
            entity.events.push_back(std::move(e));
        }
        entities.push_back(std::move(entity));
    }
    return entities;
}

}  // namespace tracefeed
