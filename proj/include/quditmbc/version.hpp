#ifndef QUDITMBC_VERSION_HPP
#define QUDITMBC_VERSION_HPP

#define QUDITMBC_VERSION "0.1.0"

#endif
