#include "girit/io.hpp"

#include "girit/error.hpp"

#include <fstream>
#include <sstream>

namespace girit::io {

auto read_file(std::filesystem::path const& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    std::ostringstream contents;
    contents << in.rdbuf();
    return std::move(contents).str();
}

void write_file_atomic(std::filesystem::path const& path, std::string_view bytes)
{
    write_file_atomic(path, {bytes});
}

void write_file_atomic(std::filesystem::path const& path, std::initializer_list<std::string_view> parts)
{
    auto temporary = path;
    temporary += ".tmp";
    {
        std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write file: " + temporary.string());
        }
        for (auto part : parts) {
            out.write(part.data(), static_cast<std::streamsize>(part.size()));
        }
        out.flush();
        if (!out) {
            throw Error("write failed: " + temporary.string());
        }
    }
    std::filesystem::rename(temporary, path);
}

}  // namespace girit::io
