#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "guireplay/device.hpp"
#include "guireplay/types.hpp"

namespace guireplay::wire {

/// Length-prefixed frames: u32 little-endian byte count, then the payload.
/// Requests are UTF-8 JSON; screenshot responses are raw PNG bytes, all
/// other responses JSON.
void write_frame(std::FILE* out, const std::uint8_t* data, size_t size);
void write_frame(std::FILE* out, const std::vector<std::uint8_t>& payload);

/// Reads one frame; false on clean EOF at a frame boundary.
bool read_frame(std::FILE* in, std::vector<std::uint8_t>& payload);

struct AdapterEndpoint {
    std::vector<std::string> argv;  // child process command line
    int timeout_ms = 10000;
    bool photo_source = false;      // frames are camera photos
    profile::DeviceTag tag;         // optional; geometry may come from frames
};

/// Proxies screenshot/execute over the wire protocol. Engine code is the
/// same for simulated and external devices.
std::unique_ptr<farm::DeviceHandle> external_device_session(const AdapterEndpoint& endpoint);

/// Serves one simulated device over stdio-style streams until EOF.
/// Returns the number of requests handled.
int serve_device(farm::SimulatedDevice& device, std::FILE* in, std::FILE* out);

farm::ConcreteAction action_from_wire_json(const std::string& body);
std::string action_to_wire_json(const farm::ConcreteAction& a);

}  // namespace guireplay::wire
