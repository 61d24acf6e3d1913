#pragma once

namespace topicena {

/// Reads TOPICENA_LOG (trace|debug|info|warn|error|off) and applies it to the
/// default stderr logger. Unset or unrecognized values leave "warn".
void configure_logging_from_env();

}  // namespace topicena
