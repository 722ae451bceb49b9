#pragma once

#define LEMNI_VERSION "0.1.0"
