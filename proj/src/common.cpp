#include "thermoreg/common.hpp"

#include <charconv>
#include <iostream>
#include <mutex>
#include <set>

#ifndef THERMOREG_VERSION
#define THERMOREG_VERSION "dev"
#endif

namespace thermo {
namespace {

std::mutex g_warn_mutex;

void default_sink(const std::string& message)
{
    static std::set<std::string> seen;
    if (seen.insert(message).second) {
        std::cerr << "warning: " << message << '\n';
    }
}

WarningHandler& handler_slot()
{
    static WarningHandler handler = default_sink;
    return handler;
}

} // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(g_warn_mutex);
    auto previous = std::move(handler_slot());
    handler_slot() = handler ? std::move(handler) : WarningHandler(default_sink);
    return previous;
}

void warn(const std::string& message)
{
    std::lock_guard lock(g_warn_mutex);
    handler_slot()(message);
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

std::string version_string() { return THERMOREG_VERSION; }

} // namespace thermo
