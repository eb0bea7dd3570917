#pragma once

// Mesh and text output. Every writer goes through a temp file + rename so a
// failed run never leaves a half-written artifact behind.

#include <string>

#include "scherk/meshgen.hpp"

namespace scherk::io {

void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// ASCII OBJ with v / vn / f records, 17 significant digits.
std::string obj_string(const FundamentalMesh& mesh);
void write_obj(const std::string& path, const FundamentalMesh& mesh);
FundamentalMesh read_obj(const std::string& path);

// Binary little-endian PLY: x y z nx ny nz as float64, faces as uchar/int lists.
std::string ply_bytes(const FundamentalMesh& mesh);
void write_ply(const std::string& path, const FundamentalMesh& mesh);

}  // namespace scherk::io
