#pragma once

#define TAFS_VERSION_STRING "0.1.0"
