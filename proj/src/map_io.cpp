#include "waresim/map_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace waresim {

namespace {

struct LineReader {
    std::vector<std::string> lines;
    size_t next = 0;

    explicit LineReader(const std::string& text)
    {
        std::string cur;
        for (char ch : text) {
            if (ch == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        if (!cur.empty())
            lines.push_back(cur);
    }

    bool done() const { return next >= lines.size(); }
    int line_no() const { return static_cast<int>(next) + 1; }

    const std::string& take(const char* what)
    {
        if (done())
            throw MapParseError(line_no(), 1,
                                std::string("unexpected end of document, expected ") + what);
        return lines[next++];
    }
};

long parse_header_int(LineReader& reader, const std::string& key)
{
    int line_no = reader.line_no();
    const std::string& line = reader.take(key.c_str());
    if (line.rfind(key + " ", 0) != 0)
        throw MapParseError(line_no, 1, "expected '" + key + " <value>'");
    const char* begin = line.c_str() + key.size() + 1;
    const char* end = line.c_str() + line.size();
    long value = 0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || value <= 0)
        throw MapParseError(line_no, static_cast<int>(key.size() + 2),
                            "invalid " + key + " value");
    return value;
}

double parse_header_double(LineReader& reader, const std::string& key)
{
    int line_no = reader.line_no();
    const std::string& line = reader.take(key.c_str());
    if (line.rfind(key + " ", 0) != 0)
        throw MapParseError(line_no, 1, "expected '" + key + " <value>'");
    const char* begin = line.c_str() + key.size() + 1;
    const char* end = line.c_str() + line.size();
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || value <= 0.0)
        throw MapParseError(line_no, static_cast<int>(key.size() + 2),
                            "invalid " + key + " value");
    return value;
}

int base36_digit(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'z')
        return c - 'a' + 10;
    return -1;
}

} // namespace

std::string sector_id_to_base36(int32_t id)
{
    if (id == kNoSector)
        return "#";
    static const char* digits = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string out;
    uint32_t v = static_cast<uint32_t>(id);
    do {
        out.push_back(digits[v % 36]);
        v /= 36;
    } while (v != 0);
    std::reverse(out.begin(), out.end());
    return out;
}

WarehouseMap parse_map(const std::string& document)
{
    LineReader reader(document);
    long width = parse_header_int(reader, "width");
    long height = parse_header_int(reader, "height");
    double alpha = parse_header_double(reader, "alpha");
    if (width > 100000 || height > 100000)
        throw MapParseError(1, 1, "map dimensions out of range");

    WarehouseMap map(static_cast<int>(width), static_cast<int>(height), alpha);

    for (int y = 0; y < height; ++y) {
        int line_no = reader.line_no();
        const std::string& row = reader.take("grid row");
        if (static_cast<long>(row.size()) != width)
            throw MapParseError(line_no, static_cast<int>(row.size()) + 1,
                                "grid row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(width));
        for (int x = 0; x < width; ++x) {
            CellKind kind;
            if (!cell_kind_from_code(row[x], kind))
                throw MapParseError(line_no, x + 1,
                                    std::string("unknown cell code '") + row[x] +
                                        "' at cell " + to_string(Coord{x, y}));
            map.set_kind({x, y}, kind);
        }
    }

    {
        int line_no = reader.line_no();
        const std::string& marker = reader.take("'sectors'");
        if (marker != "sectors")
            throw MapParseError(line_no, 1, "expected 'sectors' block");
    }

    int32_t max_sector = -1;
    for (int y = 0; y < height; ++y) {
        int line_no = reader.line_no();
        const std::string& row = reader.take("sector row");
        std::istringstream tokens(row);
        std::string tok;
        for (int x = 0; x < width; ++x) {
            if (!(tokens >> tok))
                throw MapParseError(line_no, static_cast<int>(row.size()) + 1,
                                    "sector row has fewer than " +
                                        std::to_string(width) + " entries");
            bool wall = map.kind({x, y}) == CellKind::Wall;
            if (tok == "#") {
                if (!wall)
                    throw MapParseError(line_no, x + 1,
                                        "cell " + to_string(Coord{x, y}) +
                                            " is passable but assigned to no sector");
                continue;
            }
            int32_t id = 0;
            for (char c : tok) {
                int digit = base36_digit(c);
                if (digit < 0)
                    throw MapParseError(line_no, x + 1,
                                        "invalid sector id '" + tok + "' at cell " +
                                            to_string(Coord{x, y}));
                id = id * 36 + digit;
                if (id > 1000000)
                    throw MapParseError(line_no, x + 1, "sector id out of range");
            }
            if (wall)
                throw MapParseError(line_no, x + 1,
                                    "wall cell " + to_string(Coord{x, y}) +
                                        " assigned to sector " + tok);
            map.set_sector({x, y}, id);
            max_sector = std::max(max_sector, id);
        }
        if (tokens >> tok)
            throw MapParseError(line_no, static_cast<int>(row.size()),
                                "sector row has more than " + std::to_string(width) +
                                    " entries");
    }

    // Sector ids must be dense so they can double as vector indices.
    std::vector<bool> seen(static_cast<size_t>(max_sector) + 1, false);
    for (int i = 0; i < map.cell_count(); ++i)
        if (map.sector_of(map.coord(i)) != kNoSector)
            seen[map.sector_of(map.coord(i))] = true;
    for (size_t s = 0; s < seen.size(); ++s)
        if (!seen[s])
            throw MapParseError(reader.line_no(), 1,
                                "sector ids not dense: id " + std::to_string(s) +
                                    " unused while " + std::to_string(max_sector) +
                                    " is used");
    map.set_sector_count(static_cast<int>(max_sector) + 1);

    if (!reader.done()) {
        int line_no = reader.line_no();
        const std::string& marker = reader.take("'mono'");
        if (marker != "mono")
            throw MapParseError(line_no, 1, "expected 'mono' block or end of document");
        while (!reader.done()) {
            int mono_line = reader.line_no();
            const std::string& line = reader.take("mono entry");
            std::istringstream tokens(line);
            long x = -1, y = -1;
            std::string dir_tok;
            if (!(tokens >> x >> y >> dir_tok) || dir_tok.size() != 1)
                throw MapParseError(mono_line, 1, "expected 'x y D' mono entry");
            std::string extra;
            if (tokens >> extra)
                throw MapParseError(mono_line, 1, "trailing tokens in mono entry");
            Dir dir;
            if (!dir_from_code(dir_tok[0], dir))
                throw MapParseError(mono_line, 1, "unknown direction '" + dir_tok + "'");
            Coord c{static_cast<int>(x), static_cast<int>(y)};
            if (!map.in_bounds(c))
                throw MapParseError(mono_line, 1,
                                    "mono entry out of bounds at " + to_string(c));
            if (!map.passable(c))
                throw MapParseError(mono_line, 1,
                                    "mono entry on wall cell " + to_string(c));
            map.set_mono(c, dir);
        }
    }

    return map;
}

WarehouseMap load_map(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open map file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str());
}

std::string serialize_map(const WarehouseMap& map)
{
    std::ostringstream out;
    out << "width " << map.width() << "\n";
    out << "height " << map.height() << "\n";
    char alpha_buf[64];
    auto res = std::to_chars(alpha_buf, alpha_buf + sizeof(alpha_buf), map.alpha());
    out << "alpha " << std::string(alpha_buf, res.ptr) << "\n";
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x)
            out << cell_code(map.kind({x, y}));
        out << "\n";
    }
    out << "sectors\n";
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (x > 0)
                out << ' ';
            out << sector_id_to_base36(map.sector_of({x, y}));
        }
        out << "\n";
    }
    bool any_mono = false;
    for (int y = 0; y < map.height() && !any_mono; ++y)
        for (int x = 0; x < map.width() && !any_mono; ++x)
            any_mono = map.has_mono({x, y});
    if (any_mono) {
        out << "mono\n";
        for (int y = 0; y < map.height(); ++y)
            for (int x = 0; x < map.width(); ++x)
                if (map.has_mono({x, y}))
                    out << x << ' ' << y << ' ' << dir_code(map.mono_dir({x, y}))
                        << "\n";
    }
    return out.str();
}

void save_map(const WarehouseMap& map, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write map file: " + path);
    out << serialize_map(map);
}

} // namespace waresim
