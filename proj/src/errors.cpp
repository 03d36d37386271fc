#include "acnet/errors.hpp"

namespace acnet {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::structural: return "structural";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::numeric_degeneracy: return "numeric-degeneracy";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::data: return "data";
    case ErrorKind::usage: return "usage";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::unsupported: return "unsupported";
    }
    return "unknown";
}

} // namespace acnet
