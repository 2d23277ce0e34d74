#pragma once

#include <filesystem>
#include <string>

#include "rroa/roa/roa.h"

namespace rroa {
namespace roa {

/// JSON document with u's coefficients keyed by exponent vector, the Gram
/// matrices and their bases, residuals, status, config and the model hash.
/// Doubles are written in shortest round-trip form, so reading back
/// reproduces them exactly. Timings are left out to keep the file
/// reproducible; they go in the run manifest.
std::string CertificateToJson(const RoaCertificate& cert);
RoaCertificate CertificateFromJson(const std::string& text);

void WriteCertificate(const RoaCertificate& cert, const std::filesystem::path& path);
/// Throws std::runtime_error on an unreadable or malformed file.
RoaCertificate ReadCertificate(const std::filesystem::path& path);

}  // namespace roa
}  // namespace rroa
