#include "guireplay/wire.hpp"

#include <json.hpp>

#include <cstring>

#include "guireplay/png_io.hpp"
#include "guireplay/proc.hpp"

namespace guireplay::wire {

using nlohmann::json;

void write_frame(std::FILE* out, const std::uint8_t* data, size_t size) {
    std::uint8_t len[4] = {static_cast<std::uint8_t>(size & 0xff),
                           static_cast<std::uint8_t>((size >> 8) & 0xff),
                           static_cast<std::uint8_t>((size >> 16) & 0xff),
                           static_cast<std::uint8_t>((size >> 24) & 0xff)};
    if (std::fwrite(len, 1, 4, out) != 4 ||
        (size > 0 && std::fwrite(data, 1, size, out) != size))
        throw DeviceIOError("write_frame: short write");
    std::fflush(out);
}

void write_frame(std::FILE* out, const std::vector<std::uint8_t>& payload) {
    write_frame(out, payload.data(), payload.size());
}

bool read_frame(std::FILE* in, std::vector<std::uint8_t>& payload) {
    std::uint8_t len[4];
    size_t got = std::fread(len, 1, 4, in);
    if (got == 0 && std::feof(in)) return false;
    if (got != 4) throw DeviceIOError("read_frame: truncated length prefix");
    std::uint32_t size = len[0] | (len[1] << 8) | (len[2] << 16) |
                         (static_cast<std::uint32_t>(len[3]) << 24);
    if (size > (1u << 28)) throw DeviceIOError("read_frame: oversized frame");
    payload.resize(size);
    if (size > 0 && std::fread(payload.data(), 1, size, in) != size)
        throw DeviceIOError("read_frame: truncated payload");
    return true;
}

farm::ConcreteAction action_from_wire_json(const std::string& body) {
    json j = json::parse(body);
    farm::ConcreteAction a;
    a.type = farm::action_from_name(j.at("type").get<std::string>());
    a.x = j.value("x", 0);
    a.y = j.value("y", 0);
    a.x2 = j.value("x2", a.x);
    a.y2 = j.value("y2", a.y);
    a.text = j.value("text", std::string());
    a.duration_ms = j.value("duration_ms", 0);
    return a;
}

std::string action_to_wire_json(const farm::ConcreteAction& a) {
    json j{{"type", farm::action_name(a.type)}, {"x", a.x},   {"y", a.y},
           {"x2", a.x2},                        {"y2", a.y2}, {"duration_ms", a.duration_ms}};
    if (!a.text.empty()) j["text"] = a.text;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Server side
// ---------------------------------------------------------------------------

int serve_device(farm::SimulatedDevice& device, std::FILE* in, std::FILE* out) {
    int handled = 0;
    std::vector<std::uint8_t> payload;
    while (read_frame(in, payload)) {
        ++handled;
        std::string body(payload.begin(), payload.end());
        try {
            json req = json::parse(body);
            std::string op = req.at("op").get<std::string>();
            if (op == "screenshot") {
                std::vector<std::uint8_t> png = pngio::encode_png(device.screenshot());
                write_frame(out, png);
            } else if (op == "execute") {
                device.execute(action_from_wire_json(req.at("action").dump()));
                std::string ok = json{{"ok", true}}.dump();
                write_frame(out, reinterpret_cast<const std::uint8_t*>(ok.data()), ok.size());
            } else {
                std::string err = json{{"ok", false}, {"error", "unknown op: " + op}}.dump();
                write_frame(out, reinterpret_cast<const std::uint8_t*>(err.data()), err.size());
            }
        } catch (const std::exception& e) {
            std::string err = json{{"ok", false}, {"error", e.what()}}.dump();
            write_frame(out, reinterpret_cast<const std::uint8_t*>(err.data()), err.size());
        }
    }
    return handled;
}

// ---------------------------------------------------------------------------
// Client side
// ---------------------------------------------------------------------------

namespace {

class AdapterDevice : public farm::DeviceHandle {
public:
    explicit AdapterDevice(const AdapterEndpoint& ep)
        : child_(ep.argv), timeout_ms_(ep.timeout_ms), photo_(ep.photo_source), tag_(ep.tag) {}

    PixelImage screenshot() override {
        std::vector<std::uint8_t> payload = round_trip(R"({"op":"screenshot"})");
        if (payload.size() >= 8 && payload[0] == 0x89 && payload[1] == 'P') {
            PixelImage img = pngio::decode_png(payload);
            if (!tag_.known() && !photo_) {
                tag_.width = img.width;
                tag_.height = img.height;
            }
            return img;
        }
        throw DeviceIOError("adapter: screenshot response is not a PNG frame: " +
                            preview(payload));
    }

    void execute(const farm::ConcreteAction& action) override {
        std::string req = std::string(R"({"op":"execute","action":)") +
                          action_to_wire_json(action) + "}";
        std::vector<std::uint8_t> payload = round_trip(req);
        try {
            json j = json::parse(payload.begin(), payload.end());
            if (j.value("ok", false)) return;
            throw DeviceIOError("adapter: execute failed: " +
                                j.value("error", std::string("unknown")));
        } catch (const json::exception&) {
            throw DeviceIOError("adapter: malformed execute response");
        }
    }

    bool photo_source() const override { return photo_; }
    profile::DeviceTag tag() const override { return tag_; }

private:
    std::string preview(const std::vector<std::uint8_t>& v) const {
        std::string s(v.begin(), v.begin() + std::min<size_t>(v.size(), 48));
        for (char& c : s)
            if (static_cast<unsigned char>(c) < 32) c = '.';
        return s;
    }

    std::vector<std::uint8_t> round_trip(const std::string& req) {
        size_t size = req.size();
        std::uint8_t len[4] = {static_cast<std::uint8_t>(size & 0xff),
                               static_cast<std::uint8_t>((size >> 8) & 0xff),
                               static_cast<std::uint8_t>((size >> 16) & 0xff),
                               static_cast<std::uint8_t>((size >> 24) & 0xff)};
        child_.write_all(len, 4);
        child_.write_all(reinterpret_cast<const std::uint8_t*>(req.data()), size);

        std::uint8_t rlen[4];
        child_.read_exact(rlen, 4, timeout_ms_);
        std::uint32_t rsize = rlen[0] | (rlen[1] << 8) | (rlen[2] << 16) |
                              (static_cast<std::uint32_t>(rlen[3]) << 24);
        if (rsize > (1u << 28)) throw DeviceIOError("adapter: oversized response frame");
        std::vector<std::uint8_t> payload(rsize);
        if (rsize > 0) child_.read_exact(payload.data(), rsize, timeout_ms_);
        return payload;
    }

    proc::ChildProcess child_;
    int timeout_ms_;
    bool photo_;
    profile::DeviceTag tag_;
};

}  // namespace

std::unique_ptr<farm::DeviceHandle> external_device_session(const AdapterEndpoint& endpoint) {
    if (endpoint.argv.empty())
        throw ContractError("external_device_session: empty adapter command");
    return std::make_unique<AdapterDevice>(endpoint);
}

}  // namespace guireplay::wire
