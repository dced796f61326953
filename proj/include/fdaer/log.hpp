#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace fdaer {

using WarningSink = std::function<void(std::string_view)>;

// Routes a warning to the installed sink (stderr by default). Thread-safe.
void warn(std::string_view message);

// Installs a new sink and returns the previous one. An empty sink restores stderr.
WarningSink set_warning_sink(WarningSink sink);

// Collects warnings for the lifetime of the object, restoring the old sink afterwards.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace fdaer
