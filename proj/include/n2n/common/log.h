// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_COMMON_LOG_H_
#define N2N_COMMON_LOG_H_

#include <iostream>
#include <sstream>

namespace n2n {

// Process-wide verbosity: 0 silences info messages.
int &LogVerbosity();

class LogMessage {
 public:
  explicit LogMessage(const char *tag) { stream_ << '[' << tag << "] "; }
  ~LogMessage() {
    if (LogVerbosity() > 0) std::cerr << stream_.str() << std::endl;
  }
  std::ostream &stream() { return stream_; }

 private:
  std::ostringstream stream_;
};

}  // namespace n2n

#define N2N_LOG_INFO ::n2n::LogMessage("INFO").stream()
#define N2N_LOG_WARN ::n2n::LogMessage("WARN").stream()

#endif  // N2N_COMMON_LOG_H_
