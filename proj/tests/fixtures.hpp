#pragma once

#include <atlnet/net.hpp>

#include <string>

inline std::string fixture(const std::string& name)
{
  return std::string(ATLNET_FIXTURES) + "/" + name;
}

inline atlnet::net_system f4()
{
  return atlnet::load_net(fixture("F4.net"));
}
